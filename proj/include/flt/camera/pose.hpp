/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/camera/pose.hpp
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

#ifndef FLT_CAMERA_POSE_HPP
#define FLT_CAMERA_POSE_HPP

#include "flt/core/error.hpp"
#include "flt/core/landmarks.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <cmath>
#include <span>
#include <vector>

namespace flt {
namespace camera {

/**
 * A scaled-orthographic camera: x = scale * P * R * X + t, where P keeps the first two rows.
 *
 * Image coordinates are pixels with the origin at the top-left and y pointing down. The camera-space
 * depth of a point is (R * X).z; larger depth is farther away from the camera.
 */
struct Pose
{
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();
    double scale = 1.0;

    /**
     * The pose as a 4x4 model-view-projection matrix mapping homogeneous model points to
     * (x_pixel, y_pixel, depth, 1).
     */
    Eigen::Matrix4d to_matrix() const
    {
        Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
        m.topLeftCorner<2, 3>() = scale * rotation.topRows<2>();
        m.block<2, 1>(0, 3) = translation;
        m.block<1, 3>(2, 0) = rotation.row(2);
        return m;
    }
};

/// Throws ArgumentError unless R is a proper rotation (within 1e-9) and scale > 0.
inline void validate(const Pose& pose)
{
    if (!(pose.scale > 0.0) || !std::isfinite(pose.scale))
    {
        throw ArgumentError("pose: scale must be positive");
    }
    if (!pose.rotation.allFinite() || !pose.translation.allFinite())
    {
        throw ArgumentError("pose: non-finite entries");
    }
    if (!(pose.rotation.transpose() * pose.rotation).isIdentity(1e-9) ||
        std::abs(pose.rotation.determinant() - 1.0) > 1e-9)
    {
        throw ArgumentError("pose: rotation is not in SO(3)");
    }
}

/// Projected image points together with their camera-space depths.
struct Projection
{
    Points2 points;
    std::vector<double> depths;
};

inline Eigen::Vector2d project(const Pose& pose, const Eigen::Vector3d& point)
{
    return pose.scale * (pose.rotation.topRows<2>() * point) + pose.translation;
}

inline double depth(const Pose& pose, const Eigen::Vector3d& point)
{
    return pose.rotation.row(2).dot(point);
}

/// Projects every point; depths are (R * X).z.
inline Projection project(const Pose& pose, std::span<const Eigen::Vector3d> points)
{
    Projection result;
    result.points.reserve(points.size());
    result.depths.reserve(points.size());
    for (const auto& p : points)
    {
        result.points.push_back(project(pose, p));
        result.depths.push_back(depth(pose, p));
    }
    return result;
}

/// Derivative of project() with respect to the 3D point: scale * P * R.
inline Eigen::Matrix<double, 2, 3> projection_jacobian(const Pose& pose, const Eigen::Vector3d& /*point*/)
{
    return pose.scale * pose.rotation.topRows<2>();
}

/// Angle of the relative rotation between \p a and \p b, in radians.
inline double geodesic_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b)
{
    // Via the quaternion; acos of the trace loses precision for tiny angles.
    return Eigen::AngleAxisd(a.transpose() * b).angle();
}

/// Rotation from yaw (about y), pitch (about x) and roll (about z), in radians, applied as Rz * Rx * Ry.
inline Eigen::Matrix3d rotation_from_euler(double yaw, double pitch, double roll)
{
    return (Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitX()) *
            Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()))
        .toRotationMatrix();
}

} // namespace camera
} // namespace flt

#endif /* FLT_CAMERA_POSE_HPP */
