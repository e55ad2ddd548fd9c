/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/eval/similarity.hpp
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

#ifndef FLT_EVAL_SIMILARITY_HPP
#define FLT_EVAL_SIMILARITY_HPP

#include "flt/core/error.hpp"
#include "flt/core/landmarks.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

namespace flt {
namespace eval {

/// Per-frame similarity scores with their mean and population variance.
struct SimilarityReport
{
    std::vector<double> per_frame;
    double average = 0.0;
    double variance = 0.0;
};

/**
 * Mean and population variance (divided by N, not N - 1) of the scores.
 *
 * @throws ArgumentError For an empty input.
 */
inline SimilarityReport similarity_stats(std::vector<double> scores)
{
    if (scores.empty())
    {
        throw ArgumentError("similarity_stats: no scores");
    }
    SimilarityReport report;
    const auto n = static_cast<double>(scores.size());
    double sum = 0.0;
    for (double s : scores)
    {
        sum += s;
    }
    report.average = sum / n;
    double squares = 0.0;
    for (double s : scores)
    {
        squares += (s - report.average) * (s - report.average);
    }
    report.variance = squares / n;
    report.per_frame = std::move(scores);
    return report;
}

/**
 * Geometric similarity of two 68-point landmark sets, in [0, 1].
 *
 * \p a is aligned onto \p b with the best similarity transform (translation, rotation and uniform scale,
 * no reflection); the RMSE of the aligned points, divided by the interocular distance of \p b, is mapped to
 * max(0, 1 - rmse). Identical shapes up to a similarity transform score 1.
 *
 * This is a geometric measure of identity agreement, not a face-recognition embedding similarity.
 *
 * @throws ArgumentError If \p b has zero interocular distance or \p a has no spatial extent.
 */
inline double landmark_similarity(std::span<const Eigen::Vector2d> a, std::span<const Eigen::Vector2d> b)
{
    if (a.size() != num_landmarks || b.size() != num_landmarks)
    {
        throw DimensionError("landmark_similarity: both sets need 68 points");
    }
    const double iod = interocular_distance(b);
    if (!(iod > 0.0))
    {
        throw ArgumentError("landmark_similarity: reference set has zero interocular distance");
    }
    Eigen::Matrix2Xd src(2, a.size());
    Eigen::Matrix2Xd dst(2, b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        src.col(static_cast<Eigen::Index>(i)) = a[i];
        dst.col(static_cast<Eigen::Index>(i)) = b[i];
    }
    const Eigen::Vector2d mean = src.rowwise().mean();
    if (!((src.colwise() - mean).squaredNorm() > 0.0))
    {
        throw ArgumentError("landmark_similarity: first set has no spatial extent");
    }
    const Eigen::Matrix3d transform = Eigen::umeyama(src, dst, true);
    const Eigen::Matrix2Xd aligned =
        (transform.topLeftCorner<2, 2>() * src).colwise() + transform.topRightCorner<2, 1>();
    const double rms = std::sqrt((aligned - dst).squaredNorm() / static_cast<double>(a.size()));
    return std::max(0.0, 1.0 - rms / iod);
}

} // namespace eval
} // namespace flt

#endif /* FLT_EVAL_SIMILARITY_HPP */
