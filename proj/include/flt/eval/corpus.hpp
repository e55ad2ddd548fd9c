/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/eval/corpus.hpp
 *
 * Copyright 2026 The flt authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#ifndef FLT_EVAL_CORPUS_HPP
#define FLT_EVAL_CORPUS_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"
#include "flt/core/io.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/core/landmarks_io.hpp"
#include "flt/core/random.hpp"
#include "flt/model/morphable_model.hpp"

#include "nlohmann/json.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace flt {
namespace eval {

/// One video of an evaluation corpus: a reference image's landmarks and the per-frame driving landmarks.
struct CorpusVideo
{
    std::string id;
    LandmarkSet reference;
    std::vector<LandmarkSet> frames;
};

struct Corpus
{
    std::vector<CorpusVideo> videos;

    std::vector<std::string> ids() const
    {
        std::vector<std::string> out;
        for (const auto& v : videos)
        {
            out.push_back(v.id);
        }
        return out;
    }

    const CorpusVideo* find(const std::string& id) const
    {
        const auto it = std::find_if(videos.begin(), videos.end(), [&](const auto& v) { return v.id == id; });
        return it == videos.end() ? nullptr : &*it;
    }
};

struct CorpusOptions
{
    std::uint64_t seed = 3;
    int n_videos = 10;
    int n_frames = 8;
    double noise_px = 0.0;            ///< std. dev. of Gaussian noise added to every landmark coordinate
    int image_size = 512;             ///< square images
    double interocular_px = 100.0;    ///< scale at which the mean face is drawn
    double identity_scale = 1.0;      ///< multiplies the per-component shape standard deviations
    double resting_expression = 0.3;  ///< half-range of each identity's resting expression offset
    /// Frames differ from the reference only by in-plane rotation and translation (no expression change,
    /// no out-of-plane rotation, constant scale).
    bool static_choreography = false;
};

/**
 * Generates a corpus with known ground truth. Each video shows its own identity (random shape coefficients
 * plus a personal resting expression) performing one shared choreography of expressions and head poses.
 * The reference of each video is its frame 0.
 */
inline Corpus synthesize_corpus(const model::MorphableModel& model, const CorpusOptions& options = {})
{
    if (options.n_videos < 1 || options.n_frames < 1)
    {
        throw ArgumentError("synthesize_corpus: need at least one video and one frame");
    }
    if (!(options.noise_px >= 0.0) || options.image_size < 1 || !(options.interocular_px > 0.0))
    {
        throw ArgumentError("synthesize_corpus: invalid noise, image size or interocular distance");
    }
    const auto m = model.num_shape_coefficients();
    const auto k = model.num_expression_coefficients();
    SplitMix64 rng(options.seed);

    struct Frame
    {
        Eigen::VectorXd expression;
        camera::Pose pose;
    };
    const double base_scale = options.interocular_px / model::mean_interocular_distance(model);
    const double centre = 0.5 * options.image_size;
    std::vector<Frame> choreography(options.n_frames);
    for (int t = 0; t < options.n_frames; ++t)
    {
        auto& frame = choreography[t];
        frame.expression = Eigen::VectorXd::Zero(k);
        if (options.static_choreography)
        {
            frame.pose.rotation = camera::rotation_from_euler(0.0, 0.0, rng.uniform(-0.3, 0.3));
            frame.pose.scale = base_scale;
        } else
        {
            for (Eigen::Index j = 0; j < k; ++j)
            {
                frame.expression(j) = rng.uniform(-0.4, 0.8);
            }
            frame.pose.rotation = camera::rotation_from_euler(rng.uniform(-0.35, 0.35), rng.uniform(-0.2, 0.2),
                                                              rng.uniform(-0.2, 0.2));
            frame.pose.scale = base_scale * rng.uniform(0.9, 1.1);
        }
        frame.pose.translation = Eigen::Vector2d(centre + rng.uniform(-20.0, 20.0), centre + rng.uniform(-20.0, 20.0));
    }

    Corpus corpus;
    for (int v = 0; v < options.n_videos; ++v)
    {
        Eigen::VectorXd shape(m);
        for (Eigen::Index j = 0; j < m; ++j)
        {
            shape(j) = options.identity_scale * model.shape_sigmas(j) * rng.normal();
        }
        Eigen::VectorXd resting(k);
        for (Eigen::Index j = 0; j < k; ++j)
        {
            resting(j) = rng.uniform(-options.resting_expression, options.resting_expression);
        }

        CorpusVideo video;
        char id[32];
        std::snprintf(id, sizeof(id), "video_%02d", v);
        video.id = id;
        for (const auto& frame : choreography)
        {
            const auto mesh = model::evaluate_mesh(model, shape, resting + frame.expression);
            LandmarkSet set;
            set.image_width = options.image_size;
            set.image_height = options.image_size;
            for (const auto& p : model::landmark_positions(model, mesh))
            {
                Eigen::Vector2d x = camera::project(frame.pose, p);
                if (options.noise_px > 0.0)
                {
                    x.x() += options.noise_px * rng.normal();
                    x.y() += options.noise_px * rng.normal();
                }
                set.points.push_back(x);
            }
            video.frames.push_back(std::move(set));
        }
        video.reference = video.frames.front();
        corpus.videos.push_back(std::move(video));
    }
    return corpus;
}

/// Frame file name inside a video's frames/ directory.
inline std::string frame_file_name(int index)
{
    char name[32];
    std::snprintf(name, sizeof(name), "%04d.json", index);
    return name;
}

/// Writes the layout <dir>/<video_id>/ref.json and <dir>/<video_id>/frames/NNNN.json, plus <dir>/ids.json.
inline void save_corpus(const Corpus& corpus, const std::filesystem::path& directory)
{
    for (const auto& video : corpus.videos)
    {
        const auto video_dir = directory / video.id;
        std::filesystem::create_directories(video_dir / "frames");
        write_landmarks(video_dir / "ref.json", video.reference);
        for (std::size_t t = 0; t < video.frames.size(); ++t)
        {
            write_landmarks(video_dir / "frames" / frame_file_name(static_cast<int>(t)), video.frames[t]);
        }
    }
    io::write_json_file(directory / "ids.json", corpus.ids());
}

/// Loads one video of an on-disk corpus; throws IoError if its files are missing.
inline CorpusVideo load_corpus_video(const std::filesystem::path& directory, const std::string& id)
{
    const auto video_dir = directory / id;
    CorpusVideo video;
    video.id = id;
    video.reference = read_landmarks(video_dir / "ref.json");
    if (!std::filesystem::is_directory(video_dir / "frames"))
    {
        throw IoError("missing frames directory \"" + (video_dir / "frames").string() + "\"");
    }
    video.frames = read_landmark_sequence(video_dir / "frames");
    if (video.frames.empty())
    {
        throw IoError("no frames in \"" + (video_dir / "frames").string() + "\"");
    }
    return video;
}

} // namespace eval
} // namespace flt

#endif /* FLT_EVAL_CORPUS_HPP */
