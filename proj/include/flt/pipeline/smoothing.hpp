/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/pipeline/smoothing.hpp
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

#ifndef FLT_PIPELINE_SMOOTHING_HPP
#define FLT_PIPELINE_SMOOTHING_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <cmath>
#include <vector>

namespace flt {
namespace pipeline {

inline void check_smoothing_alpha(double alpha)
{
    if (!(alpha >= 0.0 && alpha <= 1.0))
    {
        throw ArgumentError("smoothing alpha must lie in [0, 1]");
    }
}

/**
 * Exponential moving average y_t = alpha * y_{t-1} + (1 - alpha) * x_t with y_0 = x_0. alpha = 0 returns the
 * input, alpha = 1 repeats the first element.
 */
inline std::vector<Eigen::VectorXd> smooth_sequence(const std::vector<Eigen::VectorXd>& values, double alpha)
{
    check_smoothing_alpha(alpha);
    std::vector<Eigen::VectorXd> out;
    out.reserve(values.size());
    for (const auto& x : values)
    {
        if (out.empty())
        {
            out.push_back(x);
            continue;
        }
        if (x.size() != out.back().size())
        {
            throw DimensionError("smooth_sequence: vectors of different length");
        }
        out.push_back(alpha * out.back() + (1.0 - alpha) * x);
    }
    return out;
}

/**
 * The same average applied to poses: rotations via their quaternions (sign-aligned with the previous
 * output, averaged per component, renormalised), scale and translation linearly.
 */
inline std::vector<camera::Pose> smooth_poses(const std::vector<camera::Pose>& poses, double alpha)
{
    check_smoothing_alpha(alpha);
    if (alpha == 0.0)
    {
        return poses; // avoid the quaternion round trip
    }
    std::vector<camera::Pose> out;
    out.reserve(poses.size());
    Eigen::Vector4d q_prev;
    for (const auto& pose : poses)
    {
        Eigen::Vector4d q = Eigen::Quaterniond(pose.rotation).normalized().coeffs();
        if (out.empty())
        {
            q_prev = q;
            out.push_back(pose);
            continue;
        }
        if (q.dot(q_prev) < 0.0)
        {
            q = -q;
        }
        q_prev = (alpha * q_prev + (1.0 - alpha) * q).normalized();
        camera::Pose smoothed;
        smoothed.rotation = Eigen::Quaterniond(q_prev).toRotationMatrix();
        smoothed.scale = alpha * out.back().scale + (1.0 - alpha) * pose.scale;
        smoothed.translation = alpha * out.back().translation + (1.0 - alpha) * pose.translation;
        out.push_back(smoothed);
    }
    return out;
}

} // namespace pipeline
} // namespace flt

#endif /* FLT_PIPELINE_SMOOTHING_HPP */
