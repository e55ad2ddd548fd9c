/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: tests/support.hpp
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

#ifndef FLT_TESTS_SUPPORT_HPP
#define FLT_TESTS_SUPPORT_HPP

#include "flt/flt.hpp"

#include "Eigen/Core"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>
#include <unistd.h>

namespace flt::test {

/// A scratch directory that is removed again when the object goes out of scope.
class TempDir
{
public:
    explicit TempDir(const std::string& name)
        : path_(std::filesystem::temp_directory_path() /
                ("flt_" + name + "_" + std::to_string(static_cast<long>(::getpid()))))
    {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& child) const { return path_ / child; }

private:
    std::filesystem::path path_;
};

inline std::string read_bytes(const std::filesystem::path& path)
{
    std::ifstream file(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
}

inline model::MorphableModel small_model(std::uint64_t seed = 42)
{
    return model::synthesize_test_model(seed, 200, 4, 2);
}

/// Random rotation with bounded Euler angles (radians).
inline Eigen::Matrix3d random_rotation(SplitMix64& rng, double yaw = std::numbers::pi, double pitch = 1.2,
                                       double roll = std::numbers::pi)
{
    return camera::rotation_from_euler(rng.uniform(-yaw, yaw), rng.uniform(-pitch, pitch), rng.uniform(-roll, roll));
}

/// A face-like pose: moderate head rotation, the mean face about \p interocular_px wide, centred in 512x512.
inline camera::Pose face_pose(SplitMix64& rng, const model::MorphableModel& model, double interocular_px = 100.0)
{
    camera::Pose pose;
    pose.rotation = camera::rotation_from_euler(rng.uniform(-0.5, 0.5), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    pose.scale = interocular_px / model::mean_interocular_distance(model);
    pose.translation = Eigen::Vector2d(256.0 + rng.uniform(-10.0, 10.0), 256.0 + rng.uniform(-10.0, 10.0));
    return pose;
}

inline Eigen::VectorXd random_shape(SplitMix64& rng, const model::MorphableModel& model)
{
    Eigen::VectorXd alpha(model.num_shape_coefficients());
    for (Eigen::Index k = 0; k < alpha.size(); ++k)
    {
        alpha(k) = model.shape_sigmas(k) * rng.normal();
    }
    return alpha;
}

inline Eigen::VectorXd random_expression(SplitMix64& rng, const model::MorphableModel& model)
{
    Eigen::VectorXd beta(model.num_expression_coefficients());
    for (Eigen::Index k = 0; k < beta.size(); ++k)
    {
        beta(k) = rng.uniform(-0.5, 1.0);
    }
    return beta;
}

/// Landmarks of the model instance (alpha, beta) seen under \p pose, with optional pixel noise.
inline LandmarkSet synthesize_landmarks(const model::MorphableModel& model, const Eigen::VectorXd& alpha,
                                        const Eigen::VectorXd& beta, const camera::Pose& pose,
                                        SplitMix64* noise_rng = nullptr, double noise_px = 0.0)
{
    const auto mesh = model::evaluate_mesh(model, alpha, beta);
    LandmarkSet set;
    set.image_width = 512;
    set.image_height = 512;
    for (const auto& p : model::landmark_positions(model, mesh))
    {
        Eigen::Vector2d x = camera::project(pose, p);
        if (noise_rng)
        {
            x.x() += noise_px * noise_rng->normal();
            x.y() += noise_px * noise_rng->normal();
        }
        set.points.push_back(x);
    }
    return set;
}

/// Fit settings that run the alternation to convergence rather than stopping after the default five rounds.
inline fitting::FitConfig converged_config()
{
    fitting::FitConfig config;
    config.max_iterations = 50;
    config.convergence_tol = 1e-9;
    return config;
}

inline double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace flt::test

#endif /* FLT_TESTS_SUPPORT_HPP */
