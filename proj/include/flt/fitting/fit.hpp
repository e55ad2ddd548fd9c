/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/fitting/fit.hpp
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

#ifndef FLT_FITTING_FIT_HPP
#define FLT_FITTING_FIT_HPP

#include "flt/camera/pose.hpp"
#include "flt/camera/pose_estimation.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/fitting/contour.hpp"
#include "flt/fitting/fit_config.hpp"
#include "flt/fitting/linear_fitting.hpp"
#include "flt/model/morphable_model.hpp"

#include "Eigen/Core"

#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace flt {
namespace fitting {

/**
 * Fits pose, shape and expression of \p model to one set of 68 landmarks.
 *
 * Starting from the mean shape, each iteration estimates the pose from the current landmark vertices,
 * optionally re-selects the jaw correspondences, then solves for the shape coefficients with the expression
 * fixed and for the expression with the shape fixed. Iteration stops once the reprojection RMSE changes by
 * less than config.convergence_tol relative to the previous iteration, or after config.max_iterations.
 *
 * Landmark confidences, when present, weight the pose estimate only.
 *
 * @throws InputError For non-finite or otherwise invalid landmarks.
 * @throws ConfigurationError For an invalid config.
 * @throws NumericalError Propagated from the pose and coefficient solves.
 */
inline FitResult fit(const model::MorphableModel& model, const LandmarkSet& landmarks, const FitConfig& config = {})
{
    validate(landmarks);
    validate(config);
    const std::span<const Eigen::Vector2d> points(landmarks.points);
    std::span<const double> weights;
    if (landmarks.confidence)
    {
        weights = *landmarks.confidence;
    }

    FitResult result;
    result.shape_coeffs = Eigen::VectorXd::Zero(model.num_shape_coefficients());
    result.expr_coeffs = Eigen::VectorXd::Zero(model.num_expression_coefficients());
    result.landmark_map = model.landmark_map;

    double previous = std::numeric_limits<double>::infinity();
    for (int iteration = 1; iteration <= config.max_iterations; ++iteration)
    {
        const auto mesh = model::evaluate_mesh(model, result.shape_coeffs, result.expr_coeffs);
        result.pose = camera::estimate_pose(model::vertices_at(mesh, result.landmark_map), points, weights);
        if (config.contour_mode == ContourMode::dynamic)
        {
            result.landmark_map = update_contour_correspondence(model, result.pose, points, mesh,
                                                                ContourMode::dynamic, result.landmark_map);
        }
        result.shape_coeffs =
            fit_shape(model, result.pose, points, result.expr_coeffs, config.lambda_shape, result.landmark_map);
        result.expr_coeffs =
            fit_expression(model, result.pose, points, result.shape_coeffs, config.lambda_expr, result.landmark_map);

        result.residual_rmse = reprojection_rmse(model, result.pose, points, result.shape_coeffs, result.expr_coeffs,
                                                 result.landmark_map);
        result.iterations_run = iteration;
        const bool converged = result.residual_rmse == 0.0 ||
                               (std::isfinite(previous) &&
                                std::abs(previous - result.residual_rmse) <= config.convergence_tol * previous);
        previous = result.residual_rmse;
        if (converged)
        {
            break;
        }
    }

    const double iod = interocular_distance(points);
    result.residual_rel = iod > 0.0 ? result.residual_rmse / iod : std::numeric_limits<double>::infinity();
    return result;
}

} // namespace fitting
} // namespace flt

#endif /* FLT_FITTING_FIT_HPP */
