/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/fitting/fit_io.hpp
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

#ifndef FLT_FITTING_FIT_IO_HPP
#define FLT_FITTING_FIT_IO_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"
#include "flt/core/io.hpp"
#include "flt/fitting/fit_config.hpp"

#include "nlohmann/json.hpp"

#include "Eigen/Core"

#include <filesystem>
#include <string>
#include <vector>

namespace flt {
namespace fitting {

namespace detail {

inline nlohmann::json vector_to_json(const Eigen::VectorXd& v)
{
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd vector_from_json(const nlohmann::json& j, const char* field)
{
    if (!j.is_array())
    {
        throw ValidationError(field, std::string(field) + " must be an array of numbers");
    }
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
    {
        if (!j[i].is_number())
        {
            throw ValidationError(field, std::string(field) + " must be an array of numbers");
        }
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

inline const nlohmann::json& required(const nlohmann::json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
    {
        throw ValidationError(key, std::string("missing field \"") + key + "\"");
    }
    return j.at(key);
}

} // namespace detail

/// Rotation is stored row-major.
inline nlohmann::json pose_to_json(const camera::Pose& pose)
{
    std::vector<double> rotation;
    for (int r = 0; r < 3; ++r)
    {
        for (int c = 0; c < 3; ++c)
        {
            rotation.push_back(pose.rotation(r, c));
        }
    }
    return {{"rotation", rotation},
            {"translation", {pose.translation.x(), pose.translation.y()}},
            {"scale", pose.scale}};
}

inline camera::Pose pose_from_json(const nlohmann::json& j)
{
    const auto rotation = detail::vector_from_json(detail::required(j, "rotation"), "rotation");
    const auto translation = detail::vector_from_json(detail::required(j, "translation"), "translation");
    const auto& scale = detail::required(j, "scale");
    if (rotation.size() != 9 || translation.size() != 2 || !scale.is_number())
    {
        throw ValidationError("pose", "pose needs rotation[9], translation[2] and a numeric scale");
    }
    camera::Pose pose;
    for (int r = 0; r < 3; ++r)
    {
        for (int c = 0; c < 3; ++c)
        {
            pose.rotation(r, c) = rotation(3 * r + c);
        }
    }
    pose.translation = translation;
    pose.scale = scale.get<double>();
    try
    {
        camera::validate(pose);
    } catch (const ArgumentError& e)
    {
        throw ValidationError("pose", e.what());
    }
    return pose;
}

inline nlohmann::json to_json(const FitResult& fit)
{
    nlohmann::json j = {{"shape_coeffs", detail::vector_to_json(fit.shape_coeffs)},
                        {"expr_coeffs", detail::vector_to_json(fit.expr_coeffs)},
                        {"pose", pose_to_json(fit.pose)},
                        {"residual_rmse", fit.residual_rmse},
                        {"residual_rel", fit.residual_rel},
                        {"iterations_run", fit.iterations_run}};
    if (!fit.landmark_map.empty())
    {
        j["landmark_map"] = fit.landmark_map;
    }
    return j;
}

inline FitResult fit_result_from_json(const nlohmann::json& j)
{
    FitResult fit;
    fit.shape_coeffs = detail::vector_from_json(detail::required(j, "shape_coeffs"), "shape_coeffs");
    fit.expr_coeffs = detail::vector_from_json(detail::required(j, "expr_coeffs"), "expr_coeffs");
    fit.pose = pose_from_json(detail::required(j, "pose"));
    fit.residual_rmse = j.value("residual_rmse", 0.0);
    fit.residual_rel = j.value("residual_rel", 0.0);
    fit.iterations_run = j.value("iterations_run", 0);
    if (j.contains("landmark_map"))
    {
        try
        {
            fit.landmark_map = j.at("landmark_map").get<std::vector<int>>();
        } catch (const nlohmann::json::exception& e)
        {
            throw ValidationError("landmark_map", e.what());
        }
    }
    return fit;
}

inline FitResult read_fit(const std::filesystem::path& path)
{
    return fit_result_from_json(io::read_json_file(path));
}

inline void write_fit(const std::filesystem::path& path, const FitResult& fit)
{
    io::write_json_file(path, to_json(fit));
}

inline nlohmann::json to_json(const FitConfig& config)
{
    return {{"lambda_shape", config.lambda_shape},
            {"lambda_expr", config.lambda_expr},
            {"max_iterations", config.max_iterations},
            {"convergence_tol", config.convergence_tol},
            {"contour_mode", to_string(config.contour_mode)}};
}

/// Reads a FitConfig; absent keys keep the values of \p defaults.
inline FitConfig fit_config_from_json(const nlohmann::json& j, FitConfig defaults = {})
{
    if (!j.is_object())
    {
        throw ConfigurationError("fit config must be a JSON object");
    }
    try
    {
        defaults.lambda_shape = j.value("lambda_shape", defaults.lambda_shape);
        defaults.lambda_expr = j.value("lambda_expr", defaults.lambda_expr);
        defaults.max_iterations = j.value("max_iterations", defaults.max_iterations);
        defaults.convergence_tol = j.value("convergence_tol", defaults.convergence_tol);
        if (j.contains("contour_mode"))
        {
            defaults.contour_mode = contour_mode_from_string(j.at("contour_mode").get<std::string>());
        }
    } catch (const nlohmann::json::exception& e)
    {
        throw ConfigurationError(std::string("fit config: ") + e.what());
    }
    validate(defaults);
    return defaults;
}

} // namespace fitting
} // namespace flt

#endif /* FLT_FITTING_FIT_IO_HPP */
