/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/core/landmarks.hpp
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

#ifndef FLT_CORE_LANDMARKS_HPP
#define FLT_CORE_LANDMARKS_HPP

#include "flt/core/error.hpp"

#include "Eigen/Core"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flt {

/// Number of points in the 68-point (iBUG) landmark scheme used throughout.
inline constexpr std::size_t num_landmarks = 68;

// Outer eye corners; their distance is the project-wide normalisation length.
inline constexpr int outer_eye_corner_right = 36;
inline constexpr int outer_eye_corner_left = 45;

// Jaw contour landmarks [0, 16]; 8 is the chin.
inline constexpr int contour_first = 0;
inline constexpr int contour_chin = 8;
inline constexpr int contour_last = 16;

inline bool is_contour_landmark(int index) noexcept
{
    return index >= contour_first && index <= contour_last;
}

using Points2 = std::vector<Eigen::Vector2d>;
using Points3 = std::vector<Eigen::Vector3d>;

/**
 * 68 labelled 2D points in pixel coordinates (origin top-left, y down), with the image size they
 * were detected in and optional per-point detector confidences in [0, 1].
 */
struct LandmarkSet
{
    Points2 points;
    int image_width = 0;
    int image_height = 0;
    std::optional<std::vector<double>> confidence;
};

/**
 * Checks the LandmarkSet invariants: exactly 68 points with finite coordinates, positive image size and
 * confidences (if present) of matching length within [0, 1].
 *
 * Throws InputError on the first violation.
 */
inline void validate(const LandmarkSet& landmarks)
{
    if (landmarks.points.size() != num_landmarks)
    {
        throw InputError("landmarks: expected 68 points, got " + std::to_string(landmarks.points.size()));
    }
    for (std::size_t i = 0; i < landmarks.points.size(); ++i)
    {
        if (!landmarks.points[i].allFinite())
        {
            throw InputError("landmarks: point " + std::to_string(i) + " has a non-finite coordinate");
        }
    }
    if (landmarks.image_width <= 0 || landmarks.image_height <= 0)
    {
        throw InputError("landmarks: image dimensions must be positive");
    }
    if (landmarks.confidence)
    {
        if (landmarks.confidence->size() != num_landmarks)
        {
            throw InputError("landmarks: confidence must have 68 entries");
        }
        for (double c : *landmarks.confidence)
        {
            if (!(c >= 0.0 && c <= 1.0))
            {
                throw InputError("landmarks: confidence values must lie in [0, 1]");
            }
        }
    }
}

/// Distance between the outer eye corners (landmarks 36 and 45).
inline double interocular_distance(std::span<const Eigen::Vector2d> points)
{
    if (points.size() != num_landmarks)
    {
        throw DimensionError("interocular_distance: expected 68 points");
    }
    return (points[outer_eye_corner_left] - points[outer_eye_corner_right]).norm();
}

inline double interocular_distance(std::span<const Eigen::Vector3d> points)
{
    if (points.size() != num_landmarks)
    {
        throw DimensionError("interocular_distance: expected 68 points");
    }
    return (points[outer_eye_corner_left] - points[outer_eye_corner_right]).norm();
}

/// Root mean squared Euclidean distance between two equally long point lists.
inline double rmse(std::span<const Eigen::Vector2d> a, std::span<const Eigen::Vector2d> b)
{
    if (a.size() != b.size() || a.empty())
    {
        throw DimensionError("rmse: point lists must be non-empty and of equal length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        sum += (a[i] - b[i]).squaredNorm();
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

} // namespace flt

#endif /* FLT_CORE_LANDMARKS_HPP */
