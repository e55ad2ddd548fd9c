/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/fitting/linear_fitting.hpp
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

#ifndef FLT_FITTING_LINEAR_FITTING_HPP
#define FLT_FITTING_LINEAR_FITTING_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/model/morphable_model.hpp"

#include "Eigen/Cholesky"
#include "Eigen/Core"
#include "Eigen/Eigenvalues"

#include <cmath>
#include <span>
#include <sstream>
#include <string>

namespace flt {
namespace fitting {

/// Largest acceptable condition number of the regularised normal matrix.
inline constexpr double max_condition_number = 1e12;

namespace detail {

inline std::span<const int> resolve_map(const model::MorphableModel& model, std::span<const int> vertex_ids)
{
    const std::span<const int> map = vertex_ids.empty() ? std::span<const int>(model.landmark_map) : vertex_ids;
    if (map.size() != num_landmarks)
    {
        throw DimensionError("landmark vertex map must have 68 entries");
    }
    for (int v : map)
    {
        if (v < 0 || v >= model.num_vertices())
        {
            throw DimensionError("landmark vertex index " + std::to_string(v) + " out of range");
        }
    }
    return map;
}

/**
 * Solves min_c sum_i ||s P R (offset_i + basis_i c) + t - x_i||^2 + lambda * sum_k prior_k * c_k^2, where
 * basis_i are the three rows of \p basis belonging to landmark vertex i and offset holds the fixed part of
 * the shape (3N).
 */
inline Eigen::VectorXd solve_regularised_projection(const Eigen::MatrixXd& basis, const Eigen::VectorXd& offset,
                                                    const Eigen::VectorXd& prior, double lambda,
                                                    const camera::Pose& pose,
                                                    std::span<const Eigen::Vector2d> image_points,
                                                    std::span<const int> vertex_ids, const char* what)
{
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
    {
        throw ArgumentError(std::string(what) + ": lambda must be finite and non-negative");
    }
    if (image_points.size() != vertex_ids.size())
    {
        throw DimensionError(std::string(what) + ": point count does not match the vertex map");
    }
    const auto n_coeffs = basis.cols();
    if (n_coeffs == 0)
    {
        return Eigen::VectorXd();
    }
    const Eigen::Matrix<double, 2, 3> camera = pose.scale * pose.rotation.topRows<2>();
    const auto n_points = static_cast<Eigen::Index>(image_points.size());

    Eigen::MatrixXd a(2 * n_points, n_coeffs);
    Eigen::VectorXd b(2 * n_points);
    for (Eigen::Index i = 0; i < n_points; ++i)
    {
        const int v = vertex_ids[i];
        a.middleRows<2>(2 * i).noalias() = camera * basis.middleRows<3>(3 * v);
        const Eigen::Vector2d fixed = camera * offset.segment<3>(3 * v) + pose.translation;
        b.segment<2>(2 * i) = image_points[i] - fixed;
    }

    Eigen::MatrixXd normal = a.transpose() * a;
    normal.diagonal() += lambda * prior;

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spectrum(normal, Eigen::EigenvaluesOnly);
    const double smallest = spectrum.eigenvalues()(0);
    const double largest = spectrum.eigenvalues()(n_coeffs - 1);
    if (!(smallest > 0.0) || largest / smallest > max_condition_number)
    {
        std::ostringstream message;
        message << what << ": normal matrix is ill-conditioned (condition number "
                << (smallest > 0.0 ? largest / smallest : INFINITY) << "); increase the regularisation";
        throw IllConditionedError(message.str());
    }
    return normal.ldlt().solve(a.transpose() * b);
}

} // namespace detail

/**
 * Fits the PCA shape coefficients for a fixed pose and fixed expression by regularised linear least
 * squares:
 *
 *   min_alpha sum_i ||project(pose, mean_i + B_i alpha + E_i beta) - x_i||^2 + lambda * sum_k (alpha_k/sigma_k)^2
 *
 * @param[in] model The morphable model.
 * @param[in] pose Current camera.
 * @param[in] image_points The 68 observed landmarks, in pixels.
 * @param[in] expr_fixed Blendshape coefficients held fixed during the solve.
 * @param[in] lambda_shape Regularisation weight (>= 0).
 * @param[in] vertex_ids Landmark-to-vertex map to use; empty means the model's map.
 * @return M shape coefficients.
 */
inline Eigen::VectorXd fit_shape(const model::MorphableModel& model, const camera::Pose& pose,
                                 std::span<const Eigen::Vector2d> image_points, const Eigen::VectorXd& expr_fixed,
                                 double lambda_shape, std::span<const int> vertex_ids = {})
{
    if (expr_fixed.size() != model.expression_basis.cols())
    {
        throw DimensionError("fit_shape: expression coefficient count does not match the model");
    }
    const auto map = detail::resolve_map(model, vertex_ids);
    Eigen::VectorXd offset = model.mean_shape;
    if (expr_fixed.size() > 0)
    {
        offset.noalias() += model.expression_basis * expr_fixed;
    }
    const Eigen::VectorXd prior = model.shape_sigmas.array().square().inverse().matrix();
    return detail::solve_regularised_projection(model.shape_basis, offset, prior, lambda_shape, pose, image_points,
                                                map, "fit_shape");
}

/**
 * Fits the blendshape coefficients for a fixed pose and fixed shape; the counterpart of fit_shape() with a
 * plain (unit-weight) ridge, since blendshapes carry no variances. Coefficients are not clamped.
 */
inline Eigen::VectorXd fit_expression(const model::MorphableModel& model, const camera::Pose& pose,
                                      std::span<const Eigen::Vector2d> image_points,
                                      const Eigen::VectorXd& shape_fixed, double lambda_expr,
                                      std::span<const int> vertex_ids = {})
{
    if (shape_fixed.size() != model.shape_basis.cols())
    {
        throw DimensionError("fit_expression: shape coefficient count does not match the model");
    }
    const auto map = detail::resolve_map(model, vertex_ids);
    const Eigen::VectorXd offset = model.mean_shape + model.shape_basis * shape_fixed;
    const Eigen::VectorXd prior = Eigen::VectorXd::Ones(model.expression_basis.cols());
    return detail::solve_regularised_projection(model.expression_basis, offset, prior, lambda_expr, pose,
                                                image_points, map, "fit_expression");
}

/// Reprojection RMSE (pixels) of the model instance (shape, expr) under \p pose against \p image_points.
inline double reprojection_rmse(const model::MorphableModel& model, const camera::Pose& pose,
                                std::span<const Eigen::Vector2d> image_points, const Eigen::VectorXd& shape_coeffs,
                                const Eigen::VectorXd& expr_coeffs, std::span<const int> vertex_ids = {})
{
    const auto map = detail::resolve_map(model, vertex_ids);
    const auto mesh = model::evaluate_mesh(model, shape_coeffs, expr_coeffs);
    Points2 projected;
    projected.reserve(map.size());
    for (int v : map)
    {
        projected.push_back(camera::project(pose, mesh.vertex(v)));
    }
    return rmse(projected, image_points);
}

} // namespace fitting
} // namespace flt

#endif /* FLT_FITTING_LINEAR_FITTING_HPP */
