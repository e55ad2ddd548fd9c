/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/fitting/contour.hpp
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

#ifndef FLT_FITTING_CONTOUR_HPP
#define FLT_FITTING_CONTOUR_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/fitting/fit_config.hpp"
#include "flt/model/morphable_model.hpp"

#include "Eigen/Core"

#include <limits>
#include <span>
#include <vector>

namespace flt {
namespace fitting {

/**
 * Re-assigns the jaw landmarks (0-16) to the contour candidate vertices whose projection under \p pose
 * lies nearest to the observed landmark.
 *
 * Landmarks 0-7 choose from contour_left, 9-16 from contour_right and the chin (8) from both rings. On
 * exact distance ties the candidate listed first wins. Entries 17-67 are copied from \p current_map.
 *
 * @param[in] model Model providing the candidate rings.
 * @param[in] pose Current camera.
 * @param[in] image_points The 68 observed landmarks.
 * @param[in] mesh Current mesh (the candidates' positions are read from it).
 * @param[in] mode With ContourMode::fixed, \p current_map is returned unchanged.
 * @param[in] current_map Mapping to update; empty means the model's landmark map.
 * @return The updated 68-entry landmark-to-vertex map.
 * @throws ConfigurationError In dynamic mode if a candidate ring is empty.
 */
inline std::vector<int> update_contour_correspondence(const model::MorphableModel& model, const camera::Pose& pose,
                                                      std::span<const Eigen::Vector2d> image_points,
                                                      const model::Mesh& mesh,
                                                      ContourMode mode = ContourMode::dynamic,
                                                      std::span<const int> current_map = {})
{
    const std::span<const int> base = current_map.empty() ? std::span<const int>(model.landmark_map) : current_map;
    if (base.size() != num_landmarks || image_points.size() != num_landmarks)
    {
        throw DimensionError("update_contour_correspondence: expected 68 landmarks and 68 map entries");
    }
    std::vector<int> map(base.begin(), base.end());
    if (mode == ContourMode::fixed)
    {
        return map;
    }
    if (model.contour_left.empty() || model.contour_right.empty())
    {
        throw ConfigurationError("dynamic contour mode needs non-empty contour candidate rings");
    }
    if (mesh.num_vertices() != model.num_vertices())
    {
        throw DimensionError("update_contour_correspondence: mesh does not belong to the model");
    }

    const auto nearest = [&](int landmark, std::initializer_list<const std::vector<int>*> rings) {
        double best = std::numeric_limits<double>::infinity();
        int best_vertex = map[landmark];
        for (const auto* ring : rings)
        {
            for (int v : *ring)
            {
                const double d = (camera::project(pose, mesh.vertex(v)) - image_points[landmark]).squaredNorm();
                if (d < best)
                {
                    best = d;
                    best_vertex = v;
                }
            }
        }
        return best_vertex;
    };

    for (int k = contour_first; k <= contour_last; ++k)
    {
        if (k < contour_chin)
        {
            map[k] = nearest(k, {&model.contour_left});
        } else if (k > contour_chin)
        {
            map[k] = nearest(k, {&model.contour_right});
        } else
        {
            map[k] = nearest(k, {&model.contour_left, &model.contour_right});
        }
    }
    return map;
}

} // namespace fitting
} // namespace flt

#endif /* FLT_FITTING_CONTOUR_HPP */
