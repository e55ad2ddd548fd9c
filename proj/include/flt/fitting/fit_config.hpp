/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/fitting/fit_config.hpp
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

#ifndef FLT_FITTING_FIT_CONFIG_HPP
#define FLT_FITTING_FIT_CONFIG_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"

#include "Eigen/Core"

#include <cmath>
#include <string>
#include <vector>

namespace flt {
namespace fitting {

/// How jaw landmarks 0-16 are matched to model vertices.
enum class ContourMode {
    fixed,  ///< always the model's landmark map ("static" in config files)
    dynamic ///< re-selected from the contour candidate rings each iteration
};

inline std::string to_string(ContourMode mode)
{
    return mode == ContourMode::dynamic ? "dynamic" : "static";
}

inline ContourMode contour_mode_from_string(const std::string& name)
{
    if (name == "static")
    {
        return ContourMode::fixed;
    }
    if (name == "dynamic")
    {
        return ContourMode::dynamic;
    }
    throw ConfigurationError("contour_mode must be \"static\" or \"dynamic\", got \"" + name + "\"");
}

struct FitConfig
{
    double lambda_shape = 1.0;      ///< weight of the sum of (alpha_k / sigma_k)^2
    double lambda_expr = 0.1;       ///< weight of the plain ridge on the blendshape coefficients
    int max_iterations = 5;
    double convergence_tol = 1e-6;  ///< on the relative change of the residual between iterations
    ContourMode contour_mode = ContourMode::fixed;
};

inline void validate(const FitConfig& config)
{
    if (!(config.lambda_shape >= 0.0) || !std::isfinite(config.lambda_shape))
    {
        throw ConfigurationError("lambda_shape must be finite and non-negative");
    }
    if (!(config.lambda_expr >= 0.0) || !std::isfinite(config.lambda_expr))
    {
        throw ConfigurationError("lambda_expr must be finite and non-negative");
    }
    if (config.max_iterations < 1)
    {
        throw ConfigurationError("max_iterations must be at least 1");
    }
    if (!(config.convergence_tol > 0.0))
    {
        throw ConfigurationError("convergence_tol must be positive");
    }
}

/**
 * Output of fitting one landmark set.
 *
 * landmark_map records the 68 vertex indices the fit ended with; it differs from the model's map only in
 * the jaw entries, and only with ContourMode::dynamic.
 */
struct FitResult
{
    Eigen::VectorXd shape_coeffs;
    Eigen::VectorXd expr_coeffs;
    camera::Pose pose;
    double residual_rmse = 0.0; ///< pixels
    double residual_rel = 0.0;  ///< residual_rmse over the observed interocular distance
    int iterations_run = 0;
    std::vector<int> landmark_map;
};

} // namespace fitting
} // namespace flt

#endif /* FLT_FITTING_FIT_CONFIG_HPP */
