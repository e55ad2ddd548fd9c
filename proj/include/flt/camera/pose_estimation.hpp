/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/camera/pose_estimation.hpp
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

#ifndef FLT_CAMERA_POSE_ESTIMATION_HPP
#define FLT_CAMERA_POSE_ESTIMATION_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"
#include "Eigen/QR"
#include "Eigen/SVD"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace flt {
namespace camera {

namespace detail {

inline double pose_cost(const Pose& pose, std::span<const Eigen::Vector3d> points3d,
                        std::span<const Eigen::Vector2d> points2d, std::span<const double> weights)
{
    double cost = 0.0;
    for (std::size_t i = 0; i < points3d.size(); ++i)
    {
        cost += weights[i] * (project(pose, points3d[i]) - points2d[i]).squaredNorm();
    }
    return cost;
}

/**
 * Gauss-Newton on the full scaled-orthographic objective, parametrised by a right-multiplied rotation
 * increment exp([w]x), a scale increment and a translation increment. Steps that do not lower the cost
 * are halved; the input pose is returned unchanged if no step helps.
 */
inline Pose refine_pose(Pose pose, std::span<const Eigen::Vector3d> points3d,
                        std::span<const Eigen::Vector2d> points2d, std::span<const double> weights)
{
    double cost = pose_cost(pose, points3d, points2d, weights);
    for (int iteration = 0; iteration < 20 && cost > 0.0; ++iteration)
    {
        Eigen::Matrix<double, 6, 6> normal = Eigen::Matrix<double, 6, 6>::Zero();
        Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
        const Eigen::Matrix<double, 2, 3> pr = pose.rotation.topRows<2>();
        for (std::size_t i = 0; i < points3d.size(); ++i)
        {
            const Eigen::Vector3d& X = points3d[i];
            const Eigen::Vector2d residual = project(pose, X) - points2d[i];
            Eigen::Matrix3d skew;
            skew << 0.0, -X.z(), X.y(), X.z(), 0.0, -X.x(), -X.y(), X.x(), 0.0;
            Eigen::Matrix<double, 2, 6> jacobian;
            jacobian.leftCols<3>() = -pose.scale * pr * skew;
            jacobian.col(3) = pr * X;
            jacobian.rightCols<2>() = Eigen::Matrix2d::Identity();
            normal.noalias() += weights[i] * jacobian.transpose() * jacobian;
            rhs.noalias() -= weights[i] * jacobian.transpose() * residual;
        }
        const Eigen::Matrix<double, 6, 1> step = normal.ldlt().solve(rhs);
        if (!step.allFinite())
        {
            break;
        }
        bool improved = false;
        double fraction = 1.0;
        for (int halving = 0; halving < 8; ++halving, fraction *= 0.5)
        {
            const Eigen::Matrix<double, 6, 1> s = fraction * step;
            Pose candidate = pose;
            const double angle = s.head<3>().norm();
            if (angle > 0.0)
            {
                candidate.rotation = pose.rotation * Eigen::AngleAxisd(angle, s.head<3>() / angle).toRotationMatrix();
            }
            candidate.scale = pose.scale + s(3);
            candidate.translation = pose.translation + s.tail<2>();
            if (!(candidate.scale > 0.0))
            {
                continue;
            }
            const double candidate_cost = pose_cost(candidate, points3d, points2d, weights);
            if (candidate_cost < cost)
            {
                const double decrease = cost - candidate_cost;
                pose = candidate;
                improved = decrease > 1e-15 * cost;
                cost = candidate_cost;
                break;
            }
        }
        if (!improved)
        {
            break;
        }
    }
    // Remove the rounding drift accumulated by the rotation updates.
    pose.rotation = Eigen::Quaterniond(pose.rotation).normalized().toRotationMatrix();
    return pose;
}

} // namespace detail

/**
 * Estimates the scaled-orthographic pose that maps \p points3d onto \p points2d in the weighted
 * least-squares sense, i.e. minimises sum_i w_i * ||scale * P * R * X_i + t - x_i||^2.
 *
 * A linear affine camera is fitted first, its two rows are projected onto a scaled rotation with an
 * orthogonal Procrustes step (flipping the last singular vector if the result would be a reflection),
 * and the pose is then refined by Gauss-Newton on the objective above. Noise-free input is recovered
 * exactly by the linear step already.
 *
 * @param[in] points3d Model-space points, at least four and not coplanar.
 * @param[in] points2d Corresponding image points.
 * @param[in] weights Optional non-negative per-point weights (e.g. detector confidences); empty = uniform.
 * @return The estimated pose.
 * @throws InsufficientDataError With fewer than four (positively weighted) correspondences.
 * @throws DegenerateConfigurationError If the 3D points are collinear or coplanar (singular value ratio
 *         below 1e-10) or the image points collapse.
 */
inline Pose estimate_pose(std::span<const Eigen::Vector3d> points3d, std::span<const Eigen::Vector2d> points2d,
                          std::span<const double> weights = {})
{
    const std::size_t n = points3d.size();
    if (points2d.size() != n)
    {
        throw DimensionError("estimate_pose: " + std::to_string(n) + " 3D points but " +
                             std::to_string(points2d.size()) + " 2D points");
    }
    std::vector<double> w(n, 1.0);
    if (!weights.empty())
    {
        if (weights.size() != n)
        {
            throw DimensionError("estimate_pose: weight count does not match point count");
        }
        for (std::size_t i = 0; i < n; ++i)
        {
            if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
            {
                throw ArgumentError("estimate_pose: weights must be finite and non-negative");
            }
            w[i] = weights[i];
        }
    }
    std::size_t effective = 0;
    double weight_sum = 0.0;
    for (double wi : w)
    {
        effective += wi > 0.0 ? 1 : 0;
        weight_sum += wi;
    }
    if (effective < 4)
    {
        throw InsufficientDataError("estimate_pose: need at least 4 correspondences, got " +
                                    std::to_string(effective));
    }

    Eigen::Vector3d centroid3 = Eigen::Vector3d::Zero();
    Eigen::Vector2d centroid2 = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < n; ++i)
    {
        centroid3 += w[i] * points3d[i];
        centroid2 += w[i] * points2d[i];
    }
    centroid3 /= weight_sum;
    centroid2 /= weight_sum;

    Eigen::MatrixXd design(n, 3);
    Eigen::MatrixXd targets(n, 2);
    for (std::size_t i = 0; i < n; ++i)
    {
        const double sw = std::sqrt(w[i]);
        design.row(i) = sw * (points3d[i] - centroid3).transpose();
        targets.row(i) = sw * (points2d[i] - centroid2).transpose();
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> spread(design);
    const auto& sv = spread.singularValues();
    if (!(sv(0) > 0.0) || sv(2) / sv(0) < 1e-10)
    {
        throw DegenerateConfigurationError("estimate_pose: 3D points are collinear or coplanar");
    }

    // Affine camera rows (2x3) from the centred correspondences.
    const Eigen::Matrix<double, 3, 2> affine_t = design.colPivHouseholderQr().solve(targets);
    const Eigen::Vector3d a1 = affine_t.col(0);
    const Eigen::Vector3d a2 = affine_t.col(1);
    const double n1 = a1.norm();
    const double n2 = a2.norm();
    if (!(n1 > 0.0) || !(n2 > 0.0) || !std::isfinite(n1 * n2))
    {
        throw DegenerateConfigurationError("estimate_pose: image points carry no extent");
    }

    Eigen::Matrix3d stacked;
    stacked.row(0) = a1.transpose();
    stacked.row(1) = a2.transpose();
    stacked.row(2) = a1.cross(a2).transpose() / std::sqrt(n1 * n2);
    const Eigen::JacobiSVD<Eigen::Matrix3d> procrustes(stacked, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d correction = Eigen::Matrix3d::Identity();
    if ((procrustes.matrixU() * procrustes.matrixV().transpose()).determinant() < 0.0)
    {
        correction(2, 2) = -1.0;
    }

    Pose pose;
    pose.rotation = procrustes.matrixU() * correction * procrustes.matrixV().transpose();

    // Closed-form scale for the fixed rotation, then the translation.
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const Eigen::Vector2d rotated = pose.rotation.topRows<2>() * (points3d[i] - centroid3);
        numerator += w[i] * rotated.dot(points2d[i] - centroid2);
        denominator += w[i] * rotated.squaredNorm();
    }
    if (!(denominator > 0.0) || !(numerator > 0.0))
    {
        throw DegenerateConfigurationError("estimate_pose: could not determine a positive scale");
    }
    pose.scale = numerator / denominator;
    pose.translation = centroid2 - pose.scale * (pose.rotation.topRows<2>() * centroid3);

    return detail::refine_pose(pose, points3d, points2d, w);
}

} // namespace camera
} // namespace flt

#endif /* FLT_CAMERA_POSE_ESTIMATION_HPP */
