/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/eval/shuffle_eval.hpp
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

#ifndef FLT_EVAL_SHUFFLE_EVAL_HPP
#define FLT_EVAL_SHUFFLE_EVAL_HPP

#include "flt/core/error.hpp"
#include "flt/core/io.hpp"
#include "flt/eval/corpus.hpp"
#include "flt/eval/shuffle.hpp"
#include "flt/eval/similarity.hpp"
#include "flt/fitting/fit.hpp"
#include "flt/fitting/fit_config.hpp"
#include "flt/model/morphable_model.hpp"
#include "flt/pipeline/parallel.hpp"
#include "flt/transform/transform.hpp"

#include "nlohmann/json.hpp"

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace flt {
namespace eval {

inline constexpr const char* similarity_metric_name = "landmark_similarity";

struct EvalOptions
{
    bool baseline = false; ///< score the raw driving landmarks instead of the transformed ones
    fitting::FitConfig fit_config;
    unsigned threads = 0;
};

/// Scores of one (driving video, reference) pair.
struct PairReport
{
    int pair_id = 0;
    std::string video_id;
    std::string reference_id;
    SimilarityReport stats;
    int failed_frames = 0; ///< driving frames whose fit failed (excluded from stats)
};

struct SkippedPair
{
    int pair_id = 0;
    std::string video_id;
    std::string reason;
};

struct EvalReport
{
    bool baseline = false;
    std::vector<PairReport> pairs;
    std::vector<SkippedPair> skipped;
    double grand_average_video = 0.0;  ///< mean of the per-pair averages
    double grand_variance_video = 0.0; ///< mean of the per-pair variances
    double grand_average_frame = 0.0;  ///< mean over all scored frames
    std::size_t scored_frames = 0;
};

/**
 * Runs the shuffle protocol: video i is driven onto the reference image of video plan.assignment[i].
 *
 * Every frame is scored with landmark_similarity() against the reference fit's own projected landmarks.
 * With options.baseline the raw driving landmarks are scored; otherwise the transformed landmarks (reference
 * shape, driving expression and pose). Pairs whose video or reference is absent from \p corpus, or whose
 * reference cannot be fitted, are listed in EvalReport::skipped.
 *
 * @throws ArgumentError For an empty plan, or if no pair could be evaluated.
 */
inline EvalReport run_shuffle_eval(const model::MorphableModel& model, const Corpus& corpus, const ShufflePlan& plan,
                                   const EvalOptions& options = {})
{
    if (plan.video_ids.empty())
    {
        throw ArgumentError("run_shuffle_eval: empty corpus");
    }
    validate(plan);
    const auto n = plan.video_ids.size();
    std::vector<const CorpusVideo*> videos(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        videos[i] = corpus.find(plan.video_ids[i]);
    }

    // Reference fits, one per video.
    std::vector<std::optional<fitting::FitResult>> reference_fits(n);
    std::vector<std::optional<Points2>> reference_points(n);
    std::vector<std::string> reference_errors(n);
    pipeline::parallel_for(n, options.threads, [&](std::size_t i) {
        if (!videos[i])
        {
            return;
        }
        try
        {
            reference_fits[i] = fitting::fit(model, videos[i]->reference, options.fit_config);
            reference_points[i] =
                transform::transform_landmarks(model, *reference_fits[i], *reference_fits[i], false).points;
        } catch (const Error& e)
        {
            reference_errors[i] = e.what();
        }
    });

    // Driving frame fits (not needed by the baseline).
    std::vector<std::vector<std::optional<fitting::FitResult>>> frame_fits(n);
    std::vector<std::pair<std::size_t, std::size_t>> frame_tasks;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (videos[i] && !options.baseline)
        {
            frame_fits[i].resize(videos[i]->frames.size());
            for (std::size_t t = 0; t < videos[i]->frames.size(); ++t)
            {
                frame_tasks.emplace_back(i, t);
            }
        }
    }
    pipeline::parallel_for(frame_tasks.size(), options.threads, [&](std::size_t task) {
        const auto [i, t] = frame_tasks[task];
        try
        {
            frame_fits[i][t] = fitting::fit(model, videos[i]->frames[t], options.fit_config);
        } catch (const Error&)
        {
        }
    });

    EvalReport report;
    report.baseline = options.baseline;
    std::vector<std::optional<PairReport>> rows(n);
    std::vector<std::string> row_errors(n);
    pipeline::parallel_for(n, options.threads, [&](std::size_t i) {
        const auto target = static_cast<std::size_t>(plan.assignment[i]);
        if (!videos[i] || !videos[target])
        {
            row_errors[i] = "missing corpus files for " + plan.video_ids[videos[i] ? target : i];
            return;
        }
        if (!reference_fits[target])
        {
            row_errors[i] = "reference fit failed: " + reference_errors[target];
            return;
        }
        PairReport row;
        row.pair_id = static_cast<int>(i);
        row.video_id = plan.video_ids[i];
        row.reference_id = plan.video_ids[target];
        std::vector<double> scores;
        for (std::size_t t = 0; t < videos[i]->frames.size(); ++t)
        {
            const auto& frame = videos[i]->frames[t];
            try
            {
                if (options.baseline)
                {
                    scores.push_back(landmark_similarity(frame.points, *reference_points[target]));
                    continue;
                }
                if (!frame_fits[i][t])
                {
                    ++row.failed_frames;
                    continue;
                }
                transform::TransformOptions transform_options;
                transform_options.occlusion_check = false;
                transform_options.contour_mode = options.fit_config.contour_mode;
                transform_options.driving_points = frame.points;
                const auto moved =
                    transform::transform_landmarks(model, *reference_fits[target], *frame_fits[i][t], transform_options);
                scores.push_back(landmark_similarity(moved.points, *reference_points[target]));
            } catch (const Error&)
            {
                ++row.failed_frames;
            }
        }
        if (scores.empty())
        {
            row_errors[i] = "no frame could be scored";
            return;
        }
        row.stats = similarity_stats(std::move(scores));
        rows[i] = std::move(row);
    });

    double frame_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (!rows[i])
        {
            report.skipped.push_back({static_cast<int>(i), plan.video_ids[i], row_errors[i]});
            continue;
        }
        report.grand_average_video += rows[i]->stats.average;
        report.grand_variance_video += rows[i]->stats.variance;
        for (double s : rows[i]->stats.per_frame)
        {
            frame_sum += s;
        }
        report.scored_frames += rows[i]->stats.per_frame.size();
        report.pairs.push_back(std::move(*rows[i]));
    }
    if (report.pairs.empty())
    {
        throw ArgumentError("run_shuffle_eval: no pair could be evaluated");
    }
    report.grand_average_video /= static_cast<double>(report.pairs.size());
    report.grand_variance_video /= static_cast<double>(report.pairs.size());
    report.grand_average_frame = frame_sum / static_cast<double>(report.scored_frames);
    return report;
}

/// Loads the plan's videos from an on-disk corpus (missing ones are left out and later reported as skipped).
inline Corpus load_corpus(const std::filesystem::path& directory, const std::vector<std::string>& ids,
                          std::vector<std::string>* missing = nullptr)
{
    Corpus corpus;
    for (const auto& id : ids)
    {
        try
        {
            corpus.videos.push_back(load_corpus_video(directory, id));
        } catch (const Error& e)
        {
            if (missing)
            {
                missing->push_back(id + ": " + e.what());
            }
        }
    }
    return corpus;
}

/// CSV table: one row per evaluated pair, columns pair_id, <metric>_avg, <metric>_var.
inline std::string report_csv(const EvalReport& report)
{
    std::string csv = std::string("pair_id,video_id,reference_id,frames,") + similarity_metric_name + "_avg," +
                      similarity_metric_name + "_var\n";
    char line[160];
    for (const auto& row : report.pairs)
    {
        std::snprintf(line, sizeof(line), ",%zu,%.17g,%.17g\n", row.stats.per_frame.size(), row.stats.average,
                      row.stats.variance);
        csv += std::to_string(row.pair_id) + "," + row.video_id + "," + row.reference_id + line;
    }
    return csv;
}

inline nlohmann::json report_summary(const EvalReport& report)
{
    nlohmann::json skipped = nlohmann::json::array();
    for (const auto& s : report.skipped)
    {
        skipped.push_back({{"pair_id", s.pair_id}, {"video_id", s.video_id}, {"reason", s.reason}});
    }
    return {{"metric", similarity_metric_name},
            {"mode", report.baseline ? "baseline" : "transformed"},
            {"pairs", report.pairs.size()},
            {"scored_frames", report.scored_frames},
            {"grand_average_video_weighted", report.grand_average_video},
            {"grand_variance_video_weighted", report.grand_variance_video},
            {"grand_average_frame_weighted", report.grand_average_frame},
            {"skipped", skipped}};
}

/// Writes report.csv and summary.json into \p directory.
inline void write_report(const std::filesystem::path& directory, const EvalReport& report)
{
    std::filesystem::create_directories(directory);
    io::write_text_file(directory / "report.csv", report_csv(report));
    io::write_json_file(directory / "summary.json", report_summary(report));
}

} // namespace eval
} // namespace flt

#endif /* FLT_EVAL_SHUFFLE_EVAL_HPP */
