/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/transform/transform.hpp
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

#ifndef FLT_TRANSFORM_TRANSFORM_HPP
#define FLT_TRANSFORM_TRANSFORM_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/fitting/contour.hpp"
#include "flt/fitting/fit_config.hpp"
#include "flt/model/morphable_model.hpp"
#include "flt/render/rasterizer.hpp"

#include "nlohmann/json.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace flt {
namespace transform {

/// The 68 transformed landmarks of one driving frame, in the driving image's pixel frame.
struct TransformedLandmarks
{
    Points2 points;
    std::vector<bool> visibility;
    int source_frame = 0;
    int image_width = 0;
    int image_height = 0;
};

struct TransformOptions
{
    bool occlusion_check = true;
    /// With ContourMode::dynamic and driving_points given, jaw landmarks are re-selected on the transformed
    /// mesh under the driving pose. Otherwise the driving fit's own landmark map is used.
    fitting::ContourMode contour_mode = fitting::ContourMode::fixed;
    std::span<const Eigen::Vector2d> driving_points;
    int source_frame = 0;
    int image_width = 0;
    int image_height = 0;
};

/// Relative occlusion tolerance, as a fraction of the mesh bounding-box diagonal.
inline constexpr double depth_epsilon_fraction = 1e-4;

/**
 * The reference identity with the driving expression: mean + shape_basis * fit_ref.shape_coeffs +
 * expression_basis * fit_drive.expr_coeffs.
 *
 * @throws DimensionError If either fit does not match the model's dimensions.
 */
inline model::Mesh recombine(const model::MorphableModel& model, const fitting::FitResult& fit_ref,
                             const fitting::FitResult& fit_drive)
{
    const auto m = model.num_shape_coefficients();
    const auto k = model.num_expression_coefficients();
    if (fit_ref.shape_coeffs.size() != m || fit_drive.shape_coeffs.size() != m ||
        fit_ref.expr_coeffs.size() != k || fit_drive.expr_coeffs.size() != k)
    {
        throw DimensionError("recombine: fits do not match the model dimensions");
    }
    return model::evaluate_mesh(model, fit_ref.shape_coeffs, fit_drive.expr_coeffs);
}

namespace detail {

inline std::vector<int> projection_map(const model::MorphableModel& model, const fitting::FitResult& fit_drive,
                                       const model::Mesh& mesh, const TransformOptions& options)
{
    std::vector<int> map = fit_drive.landmark_map.empty() ? model.landmark_map : fit_drive.landmark_map;
    if (map.size() != num_landmarks)
    {
        throw DimensionError("driving fit carries a landmark map without 68 entries");
    }
    if (options.contour_mode == fitting::ContourMode::dynamic && !options.driving_points.empty())
    {
        map = fitting::update_contour_correspondence(model, fit_drive.pose, options.driving_points, mesh,
                                                     fitting::ContourMode::dynamic, map);
    }
    return map;
}

inline double bounding_box_diagonal(const model::Mesh& mesh)
{
    if (mesh.num_vertices() == 0)
    {
        return 0.0;
    }
    const auto xyz = mesh.vertices.reshaped(3, mesh.num_vertices());
    return (xyz.rowwise().maxCoeff() - xyz.rowwise().minCoeff()).norm();
}

} // namespace detail

/**
 * Visibility of points on \p mesh under \p pose. A point is hidden when its depth exceeds, by more than
 * 1e-4 of the mesh's bounding-box diagonal, the farthest z-buffer value among the 2x2 pixels whose centres
 * surround its projection. Using the farthest of the four keeps points on steeply inclined but unoccluded
 * surface from being flagged by the neighbouring pixel's depth.
 */
inline std::vector<bool> landmark_visibility(const model::Mesh& mesh, const camera::Pose& pose,
                                             std::span<const Eigen::Vector3d> points)
{
    const auto window = render::render_depth_window(mesh, pose);
    const double epsilon = depth_epsilon_fraction * detail::bounding_box_diagonal(mesh);
    std::vector<bool> visible(points.size(), true);
    for (std::size_t i = 0; i < points.size(); ++i)
    {
        const Eigen::Vector2d p = camera::project(pose, points[i]);
        const double z = camera::depth(pose, points[i]);
        const int ix = static_cast<int>(std::floor(p.x() - 0.5));
        const int iy = static_cast<int>(std::floor(p.y() - 0.5));
        const double surface = std::max({window.at(ix, iy), window.at(ix + 1, iy), window.at(ix, iy + 1),
                                         window.at(ix + 1, iy + 1)});
        visible[i] = !(z > surface + epsilon);
    }
    return visible;
}

/**
 * Transformed landmarks: the landmark vertices of recombine(model, fit_ref, fit_drive), projected with the
 * driving pose. fit_ref contributes only its shape coefficients. Points are always filled in; the
 * visibility flags are all true unless options.occlusion_check is set.
 */
inline TransformedLandmarks transform_landmarks(const model::MorphableModel& model, const fitting::FitResult& fit_ref,
                                                const fitting::FitResult& fit_drive,
                                                const TransformOptions& options = {})
{
    const auto mesh = recombine(model, fit_ref, fit_drive);
    const auto map = detail::projection_map(model, fit_drive, mesh, options);
    const auto positions = model::landmark_positions(model, mesh, map);

    TransformedLandmarks out;
    out.source_frame = options.source_frame;
    out.image_width = options.image_width;
    out.image_height = options.image_height;
    out.points.reserve(positions.size());
    for (const auto& p : positions)
    {
        out.points.push_back(camera::project(fit_drive.pose, p));
    }
    out.visibility = options.occlusion_check ? landmark_visibility(mesh, fit_drive.pose, positions)
                                             : std::vector<bool>(positions.size(), true);
    return out;
}

inline TransformedLandmarks transform_landmarks(const model::MorphableModel& model, const fitting::FitResult& fit_ref,
                                                const fitting::FitResult& fit_drive, bool occlusion_check)
{
    TransformOptions options;
    options.occlusion_check = occlusion_check;
    return transform_landmarks(model, fit_ref, fit_drive, options);
}

/**
 * How far the transform moved the driving landmarks: RMSE between the transformed points and the driving
 * fit's own projected landmarks, divided by the interocular distance of the latter.
 */
inline double transfer_gap(const model::MorphableModel& model, const fitting::FitResult& fit_ref,
                           const fitting::FitResult& fit_drive, const TransformOptions& options = {})
{
    TransformOptions plain = options;
    plain.occlusion_check = false;
    const auto moved = transform_landmarks(model, fit_ref, fit_drive, plain);
    const auto own = transform_landmarks(model, fit_drive, fit_drive, plain);
    const double iod = interocular_distance(own.points);
    if (!(iod > 0.0))
    {
        return std::numeric_limits<double>::infinity();
    }
    return rmse(moved.points, own.points) / iod;
}

inline nlohmann::json to_json(const TransformedLandmarks& landmarks)
{
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : landmarks.points)
    {
        points.push_back({p.x(), p.y()});
    }
    nlohmann::json visibility = nlohmann::json::array();
    for (bool v : landmarks.visibility)
    {
        visibility.push_back(v);
    }
    return {{"image_width", landmarks.image_width},
            {"image_height", landmarks.image_height},
            {"points", points},
            {"visibility", visibility},
            {"source_frame", landmarks.source_frame}};
}

/// Plain landmark set view of the transformed points (visibility dropped).
inline LandmarkSet to_landmark_set(const TransformedLandmarks& landmarks)
{
    LandmarkSet set;
    set.points = landmarks.points;
    set.image_width = landmarks.image_width;
    set.image_height = landmarks.image_height;
    return set;
}

} // namespace transform
} // namespace flt

#endif /* FLT_TRANSFORM_TRANSFORM_HPP */
