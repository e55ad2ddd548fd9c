/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/pipeline/sequence.hpp
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

#ifndef FLT_PIPELINE_SEQUENCE_HPP
#define FLT_PIPELINE_SEQUENCE_HPP

#include "flt/core/error.hpp"
#include "flt/core/io.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/core/landmarks_io.hpp"
#include "flt/fitting/fit.hpp"
#include "flt/fitting/fit_config.hpp"
#include "flt/fitting/fit_io.hpp"
#include "flt/model/model_io.hpp"
#include "flt/model/morphable_model.hpp"
#include "flt/pipeline/parallel.hpp"
#include "flt/pipeline/smoothing.hpp"
#include "flt/render/image.hpp"
#include "flt/render/rasterizer.hpp"
#include "flt/render/texture.hpp"
#include "flt/transform/transform.hpp"

#include "nlohmann/json.hpp"

#include <cstdio>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace flt {
namespace pipeline {

/// One reference face and a driving sequence to transform onto it.
struct SequenceJob
{
    LandmarkSet reference;
    std::vector<LandmarkSet> driving;
    std::filesystem::path model_path;
    fitting::FitConfig fit_config;
    double smoothing_alpha = 0.0; ///< 0 disables temporal smoothing
    bool emit_renders = false;
    std::filesystem::path output_dir;
    bool occlusion_check = true;
    int render_width = 0;  ///< 0 = use each driving frame's image size
    int render_height = 0;
    std::optional<std::filesystem::path> texture_path; ///< reference image (PPM) used as render texture
    unsigned threads = 0;                              ///< 0 = hardware concurrency
};

inline void validate(const SequenceJob& job)
{
    if (job.driving.empty())
    {
        throw InputError("job has no driving frames");
    }
    if (!(job.smoothing_alpha >= 0.0 && job.smoothing_alpha <= 1.0))
    {
        throw ConfigurationError("smoothing_alpha must lie in [0, 1]");
    }
    if (job.render_width < 0 || job.render_height < 0 || (job.render_width == 0) != (job.render_height == 0))
    {
        throw ConfigurationError("render size must be given as two positive numbers");
    }
    fitting::validate(job.fit_config);
}

/// A driving frame that could not be processed.
struct GapRecord
{
    int frame = 0;
    std::string error;
    bool numerical = false; ///< failure came from a numerical solve rather than bad input
};

struct SequenceResult
{
    fitting::FitResult reference_fit;
    std::vector<fitting::FitResult> driving_fits; ///< after smoothing; one per entry of frames
    std::vector<transform::TransformedLandmarks> frames;
    std::vector<GapRecord> gaps;
    int reference_fits = 0; ///< number of times the reference was fitted (always 1)
};

/**
 * Runs the transformation over a whole sequence: fits the reference once, fits every driving frame (in
 * parallel), optionally smooths the driving expression and pose over time, and transforms each frame.
 *
 * A frame whose fit fails becomes a GapRecord instead of aborting the job.
 *
 * @throws Error subclasses if the reference cannot be fitted or every driving frame fails.
 */
inline SequenceResult process_sequence(const model::MorphableModel& model, const SequenceJob& job)
{
    validate(job);
    SequenceResult result;
    result.reference_fit = fitting::fit(model, job.reference, job.fit_config);
    ++result.reference_fits;

    const std::size_t n = job.driving.size();
    std::vector<std::optional<fitting::FitResult>> fits(n);
    std::vector<GapRecord> failures(n);
    parallel_for(n, job.threads, [&](std::size_t i) {
        try
        {
            fits[i] = fitting::fit(model, job.driving[i], job.fit_config);
        } catch (const NumericalError& e)
        {
            failures[i] = {static_cast<int>(i), e.what(), true};
        } catch (const Error& e)
        {
            failures[i] = {static_cast<int>(i), e.what(), false};
        }
    });

    std::vector<std::size_t> good;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (fits[i])
        {
            good.push_back(i);
        } else
        {
            result.gaps.push_back(failures[i]);
        }
    }
    if (good.empty())
    {
        bool any_numerical = false;
        for (const auto& gap : result.gaps)
        {
            any_numerical = any_numerical || gap.numerical;
        }
        const std::string summary = "all " + std::to_string(n) + " driving frames failed; first error (frame " +
                                    std::to_string(result.gaps.front().frame) + "): " + result.gaps.front().error;
        if (any_numerical)
        {
            throw NumericalError(summary);
        }
        throw InputError(summary);
    }

    if (job.smoothing_alpha > 0.0)
    {
        std::vector<Eigen::VectorXd> expressions;
        std::vector<camera::Pose> poses;
        for (std::size_t i : good)
        {
            expressions.push_back(fits[i]->expr_coeffs);
            poses.push_back(fits[i]->pose);
        }
        expressions = smooth_sequence(expressions, job.smoothing_alpha);
        poses = smooth_poses(poses, job.smoothing_alpha);
        for (std::size_t k = 0; k < good.size(); ++k)
        {
            fits[good[k]]->expr_coeffs = expressions[k];
            fits[good[k]]->pose = poses[k];
        }
    }

    result.frames.resize(good.size());
    result.driving_fits.resize(good.size());
    parallel_for(good.size(), job.threads, [&](std::size_t k) {
        const std::size_t i = good[k];
        transform::TransformOptions options;
        options.occlusion_check = job.occlusion_check;
        options.contour_mode = job.fit_config.contour_mode;
        options.driving_points = job.driving[i].points;
        options.source_frame = static_cast<int>(i);
        options.image_width = job.driving[i].image_width;
        options.image_height = job.driving[i].image_height;
        result.frames[k] = transform::transform_landmarks(model, result.reference_fit, *fits[i], options);
        result.driving_fits[k] = *fits[i];
    });
    return result;
}

/// Loads the model from job.model_path and processes the job.
inline SequenceResult process_sequence(const SequenceJob& job)
{
    return process_sequence(model::load_model(job.model_path), job);
}

inline nlohmann::json to_json(const GapRecord& gap)
{
    return {{"frame", gap.frame}, {"error", gap.error}};
}

/// File name of the render of driving frame \p frame.
inline std::string render_file_name(int frame)
{
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04d.ppm", frame);
    return name;
}

/**
 * Writes transformed.jsonl (one object per frame), gaps.jsonl and reference_fit.json into
 * job.output_dir, plus one PPM per frame when job.emit_renders is set.
 */
inline void write_sequence_outputs(const model::MorphableModel& model, const SequenceJob& job,
                                   const SequenceResult& result)
{
    std::filesystem::create_directories(job.output_dir);
    std::string transformed;
    for (const auto& frame : result.frames)
    {
        transformed += transform::to_json(frame).dump() + "\n";
    }
    io::write_text_file(job.output_dir / "transformed.jsonl", transformed);
    std::string gaps;
    for (const auto& gap : result.gaps)
    {
        gaps += to_json(gap).dump() + "\n";
    }
    io::write_text_file(job.output_dir / "gaps.jsonl", gaps);
    fitting::write_fit(job.output_dir / "reference_fit.json", result.reference_fit);

    if (!job.emit_renders)
    {
        return;
    }
    std::optional<render::Texture> texture;
    if (job.texture_path)
    {
        texture = render::bake_reference_texture(model, result.reference_fit, render::read_ppm(*job.texture_path));
    }
    parallel_for(result.frames.size(), job.threads, [&](std::size_t k) {
        const auto& frame = result.frames[k];
        const int width = job.render_width > 0 ? job.render_width : frame.image_width;
        const int height = job.render_height > 0 ? job.render_height : frame.image_height;
        const auto mesh = transform::recombine(model, result.reference_fit, result.driving_fits[k]);
        const auto rendered =
            render::rasterize(mesh, result.driving_fits[k].pose, width, height, texture ? &*texture : nullptr);
        render::write_ppm(job.output_dir / render_file_name(frame.source_frame), rendered.color);
    });
}

namespace detail {

inline LandmarkSet landmarks_field(const nlohmann::json& value, const std::filesystem::path& base)
{
    if (value.is_string())
    {
        return read_landmarks(base / value.get<std::string>());
    }
    return landmarks_from_json(value);
}

inline std::pair<int, int> parse_size(const std::string& text)
{
    const auto x = text.find('x');
    try
    {
        if (x == std::string::npos)
        {
            throw std::invalid_argument(text);
        }
        std::size_t used_w = 0;
        std::size_t used_h = 0;
        const int w = std::stoi(text.substr(0, x), &used_w);
        const int h = std::stoi(text.substr(x + 1), &used_h);
        if (used_w != x || used_h != text.size() - x - 1 || w < 1 || h < 1)
        {
            throw std::invalid_argument(text);
        }
        return {w, h};
    } catch (const std::logic_error&)
    {
        throw ConfigurationError("size must look like WIDTHxHEIGHT, got \"" + text + "\"");
    }
}

} // namespace detail

/**
 * Reads a job file: a JSON object with the SequenceJob fields. "reference" is a landmark object or a path,
 * "driving" a path to a sequence file or directory, or an inline array; relative paths resolve against
 * the job file's directory.
 */
inline SequenceJob job_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {})
{
    if (!j.is_object())
    {
        throw ConfigurationError("job config must be a JSON object");
    }
    SequenceJob job;
    try
    {
        if (j.contains("reference"))
        {
            job.reference = detail::landmarks_field(j.at("reference"), base_dir);
        }
        if (j.contains("driving"))
        {
            const auto& driving = j.at("driving");
            if (driving.is_string())
            {
                job.driving = read_landmark_sequence(base_dir / driving.get<std::string>());
            } else
            {
                for (const auto& frame : driving)
                {
                    job.driving.push_back(landmarks_from_json(frame));
                }
            }
        }
        if (j.contains("model_path"))
        {
            job.model_path = base_dir / j.at("model_path").get<std::string>();
        }
        if (j.contains("fit_config"))
        {
            job.fit_config = fitting::fit_config_from_json(j.at("fit_config"));
        }
        job.smoothing_alpha = j.value("smoothing_alpha", job.smoothing_alpha);
        job.emit_renders = j.value("emit_renders", job.emit_renders);
        job.occlusion_check = j.value("occlusion_check", job.occlusion_check);
        job.threads = j.value("threads", job.threads);
        if (j.contains("output_dir"))
        {
            job.output_dir = base_dir / j.at("output_dir").get<std::string>();
        }
        if (j.contains("render_size"))
        {
            std::tie(job.render_width, job.render_height) =
                detail::parse_size(j.at("render_size").get<std::string>());
        }
        if (j.contains("texture"))
        {
            job.texture_path = base_dir / j.at("texture").get<std::string>();
        }
    } catch (const nlohmann::json::exception& e)
    {
        throw ConfigurationError(std::string("job config: ") + e.what());
    }
    return job;
}

} // namespace pipeline
} // namespace flt

#endif /* FLT_PIPELINE_SEQUENCE_HPP */
