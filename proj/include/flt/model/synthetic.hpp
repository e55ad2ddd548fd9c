/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/model/synthetic.hpp
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

#ifndef FLT_MODEL_SYNTHETIC_HPP
#define FLT_MODEL_SYNTHETIC_HPP

#include "flt/core/error.hpp"
#include "flt/core/landmarks.hpp"
#include "flt/core/random.hpp"
#include "flt/model/detail/delaunay.hpp"
#include "flt/model/morphable_model.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace flt {
namespace model {

/*
 * Synthetic test models.
 *
 * The mean shape is the front half of an ellipsoid (semi-axes a, b, c along x, y, z) facing -z. The 68
 * landmarks sit at canonical facial positions of the iBUG scheme, lifted onto the surface. Optional
 * jaw "band" vertices just inside and outside the jawline form the contour candidate rings, and the rest
 * of the vertex budget is spent on a sunflower-spiral filler grid.
 *
 * Triangulating the points as the front part of their convex hull (Delaunay in stereographic coordinates)
 * makes the mean mesh exactly convex, which the visibility tests rely on.
 */

struct SyntheticGeometry
{
    static constexpr double semi_axis_x = 1.0;
    static constexpr double semi_axis_y = 1.25;
    static constexpr double semi_axis_z = 0.9;
    static constexpr double rim_radius = 0.97; // normalised ellipse radius of the outermost filler
    static constexpr double band_inner = 0.92;
    static constexpr double band_outer = 1.08;
};

namespace detail {

inline Eigen::Vector2d jaw_point(int k, double radial_scale)
{
    const double theta = std::numbers::pi * k / 16.0;
    return {-0.85 * radial_scale * std::cos(theta), -0.2 + 1.05 * radial_scale * std::sin(theta)};
}

/// Canonical frontal positions of the 68 landmarks in the face plane (x right, y down).
inline std::array<Eigen::Vector2d, 68> canonical_landmarks_2d()
{
    std::array<Eigen::Vector2d, 68> p;
    for (int k = 0; k <= 16; ++k)
    {
        p[k] = jaw_point(k, 1.0);
    }
    // Eyebrows: 17-21 image left (outer to inner), 22-26 image right (inner to outer).
    for (int i = 0; i < 5; ++i)
    {
        const double t = i / 4.0;
        const double x = -0.68 + 0.53 * t;
        const double y = -0.48 - 0.08 * std::sin(std::numbers::pi * t);
        p[17 + i] = {x, y};
        p[26 - i] = {-x, y};
    }
    // Nose bridge 27-30 (30 is the tip), nostrils 31-35.
    for (int i = 0; i < 4; ++i)
    {
        p[27 + i] = {0.0, -0.30 + 0.12 * i};
    }
    for (int i = 0; i < 5; ++i)
    {
        p[31 + i] = {-0.16 + 0.08 * i, 0.16};
    }
    // Eyes.
    p[36] = {-0.50, -0.28};
    p[37] = {-0.41, -0.33};
    p[38] = {-0.30, -0.33};
    p[39] = {-0.22, -0.28};
    p[40] = {-0.30, -0.24};
    p[41] = {-0.41, -0.24};
    p[42] = {0.22, -0.28};
    p[43] = {0.30, -0.33};
    p[44] = {0.41, -0.33};
    p[45] = {0.50, -0.28};
    p[46] = {0.41, -0.24};
    p[47] = {0.30, -0.24};
    // Outer lip 48-59, inner lip 60-67.
    p[48] = {-0.30, 0.45};
    p[49] = {-0.20, 0.40};
    p[50] = {-0.08, 0.37};
    p[51] = {0.00, 0.38};
    p[52] = {0.08, 0.37};
    p[53] = {0.20, 0.40};
    p[54] = {0.30, 0.45};
    p[55] = {0.20, 0.52};
    p[56] = {0.08, 0.55};
    p[57] = {0.00, 0.56};
    p[58] = {-0.08, 0.55};
    p[59] = {-0.20, 0.52};
    p[60] = {-0.24, 0.45};
    p[61] = {-0.08, 0.42};
    p[62] = {0.00, 0.42};
    p[63] = {0.08, 0.42};
    p[64] = {0.24, 0.45};
    p[65] = {0.08, 0.49};
    p[66] = {0.00, 0.49};
    p[67] = {-0.08, 0.49};
    return p;
}

/// Lifts a face-plane point onto the front of the ellipsoid.
inline Eigen::Vector3d lift_to_surface(const Eigen::Vector2d& xy)
{
    using G = SyntheticGeometry;
    const double u = xy.x() / G::semi_axis_x;
    const double v = xy.y() / G::semi_axis_y;
    return {xy.x(), xy.y(), -G::semi_axis_z * std::sqrt(std::max(0.0, 1.0 - u * u - v * v))};
}

/// Gram-Schmidt step: removes the components of \p v along the orthonormal columns of \p basis.
inline void orthogonalise_against(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& basis)
{
    for (int pass = 0; pass < 2; ++pass)
    {
        for (const auto& b : basis)
        {
            v -= b.dot(v) * b;
        }
    }
}

/// One localized displacement bump: Gaussian falloff around \p center in the face plane.
struct Bump
{
    Eigen::Vector2d center;
    double width;
    Eigen::Vector3d displacement;
};

inline std::vector<Bump> expression_template(int kind, const std::array<Eigen::Vector2d, 68>& lm)
{
    switch (kind % 8)
    {
    case 0: // jaw open
        return {{0.5 * (lm[57] + lm[8]), 0.28, {0.0, 0.12, 0.0}}, {lm[66], 0.10, {0.0, 0.05, 0.0}}};
    case 1: // smile
        return {{lm[48], 0.12, {-0.06, -0.05, 0.0}}, {lm[54], 0.12, {0.06, -0.05, 0.0}}};
    case 2: // brow raise
        return {{lm[19], 0.18, {0.0, -0.07, 0.0}}, {lm[24], 0.18, {0.0, -0.07, 0.0}}};
    case 3: // eyes close
        return {{0.5 * (lm[37] + lm[38]), 0.06, {0.0, 0.035, 0.0}},
                {0.5 * (lm[43] + lm[44]), 0.06, {0.0, 0.035, 0.0}}};
    case 4: // pucker
        return {{lm[48], 0.10, {0.05, 0.0, -0.03}}, {lm[54], 0.10, {-0.05, 0.0, -0.03}},
                {lm[62], 0.12, {0.0, 0.0, -0.05}}};
    case 5: // frown
        return {{lm[48], 0.10, {0.0, 0.05, 0.0}}, {lm[54], 0.10, {0.0, 0.05, 0.0}}};
    case 6: // brow furrow
        return {{lm[21], 0.10, {0.04, 0.03, 0.0}}, {lm[22], 0.10, {-0.04, 0.03, 0.0}}};
    default: // cheek puff
        return {{{-0.55, 0.25}, 0.22, {-0.06, 0.0, -0.03}}, {{0.55, 0.25}, 0.22, {0.06, 0.0, -0.03}}};
    }
}

} // namespace detail

/**
 * Builds a small morphable model with known structure for tests and demos.
 *
 * The result is a deterministic function of the arguments. Shape components are smooth random
 * deformation fields, orthogonalised against the seven similarity motions of the mean (so identity
 * cannot masquerade as pose) and then orthonormalised. Shape sigmas are chosen so that a one-sigma
 * coefficient displaces vertices by roughly 8% of the face half-width (RMS), decaying with the component
 * index. Expression blendshapes are Gaussian-localised deformations around the mouth, eyes and brows.
 *
 * @param[in] seed Random seed.
 * @param[in] n_vertices Total vertex count N, at least 68.
 * @param[in] n_shape Number of shape components M, at least 1.
 * @param[in] n_expr Number of expression blendshapes K, at least 1.
 * @return A validated MorphableModel.
 */
inline MorphableModel synthesize_test_model(std::uint64_t seed, int n_vertices, int n_shape, int n_expr)
{
    using G = SyntheticGeometry;
    if (n_vertices < static_cast<int>(num_landmarks))
    {
        throw ArgumentError("synthesize_test_model: n_vertices must be at least 68");
    }
    if (n_shape < 1)
    {
        throw ArgumentError("synthesize_test_model: n_shape must be at least 1");
    }
    if (n_expr < 1)
    {
        throw ArgumentError("synthesize_test_model: n_expr must be at least 1");
    }
    if (n_shape + 7 > 3 * n_vertices)
    {
        throw ArgumentError("synthesize_test_model: too many shape components for the vertex count");
    }

    SplitMix64 rng(seed);
    const auto landmarks = detail::canonical_landmarks_2d();

    // Face-plane positions: landmarks, then jaw band, then fillers.
    std::vector<Eigen::Vector2d> xy(landmarks.begin(), landmarks.end());
    const int budget = n_vertices - static_cast<int>(num_landmarks);
    const bool with_band = budget >= 68;
    std::vector<std::array<int, 2>> band_index(17, {-1, -1}); // [k][inner, outer]
    if (with_band)
    {
        for (int k = 0; k <= 16; ++k)
        {
            band_index[k][0] = static_cast<int>(xy.size());
            xy.push_back(detail::jaw_point(k, G::band_inner));
            band_index[k][1] = static_cast<int>(xy.size());
            xy.push_back(detail::jaw_point(k, G::band_outer));
        }
    }
    const int n_fixed = static_cast<int>(xy.size());
    const int n_fill = n_vertices - n_fixed;
    if (n_fill > 0)
    {
        const double area = std::numbers::pi * G::semi_axis_x * G::semi_axis_y * G::rim_radius * G::rim_radius;
        const double min_dist = 0.3 * std::sqrt(area / n_vertices);
        const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
        // Grow the spiral until enough candidates survive the spacing test.
        for (int total = n_fill;; total = total + std::max(1, total / 20))
        {
            if (total > 64 * n_fill + 4096)
            {
                throw ArgumentError("synthesize_test_model: cannot place filler vertices");
            }
            std::vector<Eigen::Vector2d> accepted;
            for (int i = 0; i < total && static_cast<int>(accepted.size()) < n_fill; ++i)
            {
                const double rho = G::rim_radius * std::sqrt((i + 0.5) / total);
                const double phi = i * golden_angle;
                const Eigen::Vector2d q(G::semi_axis_x * rho * std::cos(phi), G::semi_axis_y * rho * std::sin(phi));
                const auto too_close = [&](const Eigen::Vector2d& other) { return (other - q).norm() < min_dist; };
                if (std::any_of(xy.begin(), xy.end(), too_close) ||
                    std::any_of(accepted.begin(), accepted.end(), too_close))
                {
                    continue;
                }
                accepted.push_back(q);
            }
            if (static_cast<int>(accepted.size()) == n_fill)
            {
                xy.insert(xy.end(), accepted.begin(), accepted.end());
                break;
            }
        }
    }

    const int n = n_vertices;
    MorphableModel model;
    model.mean_shape.resize(3 * n);
    std::vector<Eigen::Vector3d> positions(n);
    for (int i = 0; i < n; ++i)
    {
        positions[i] = detail::lift_to_surface(xy[i]);
        model.mean_shape.segment<3>(3 * i) = positions[i];
    }

    // Front hull faces = Delaunay triangles of the stereographic projection of the normalised sphere points.
    std::vector<Eigen::Vector2d> stereo(n);
    for (int i = 0; i < n; ++i)
    {
        const Eigen::Vector3d s(positions[i].x() / G::semi_axis_x, positions[i].y() / G::semi_axis_y,
                                positions[i].z() / G::semi_axis_z);
        stereo[i] = s.head<2>() / (1.0 - s.z());
    }
    for (auto tri : detail::delaunay_triangulation(stereo))
    {
        const Eigen::Vector3d& a = positions[tri[0]];
        const Eigen::Vector3d& b = positions[tri[1]];
        const Eigen::Vector3d& c = positions[tri[2]];
        const Eigen::Vector3d normal = (b - a).cross(c - a);
        if (normal.dot(a + b + c) < 0.0)
        {
            std::swap(tri[1], tri[2]);
        }
        model.triangles.push_back(tri);
    }

    model.landmark_map.resize(num_landmarks);
    for (int i = 0; i < static_cast<int>(num_landmarks); ++i)
    {
        model.landmark_map[i] = i;
    }
    // Rings run from the ear down to the chin; the chin column is shared.
    const auto ring_column = [&](int k, std::vector<int>& ring) {
        if (with_band)
        {
            ring.push_back(band_index[k][0]);
        }
        ring.push_back(k);
        if (with_band)
        {
            ring.push_back(band_index[k][1]);
        }
    };
    for (int k = 0; k <= contour_chin; ++k)
    {
        ring_column(k, model.contour_left);
    }
    for (int k = contour_last; k >= contour_chin; --k)
    {
        ring_column(k, model.contour_right);
    }

    // Similarity motions of the mean: 3 translations, 3 infinitesimal rotations, uniform scaling.
    std::vector<Eigen::VectorXd> constraints;
    {
        std::vector<Eigen::VectorXd> rigid(7, Eigen::VectorXd::Zero(3 * n));
        for (int i = 0; i < n; ++i)
        {
            const Eigen::Vector3d& x = positions[i];
            for (int axis = 0; axis < 3; ++axis)
            {
                rigid[axis](3 * i + axis) = 1.0;
                rigid[3 + axis].segment<3>(3 * i) = Eigen::Vector3d::Unit(axis).cross(x);
            }
            rigid[6].segment<3>(3 * i) = x;
        }
        for (auto& v : rigid)
        {
            detail::orthogonalise_against(v, constraints);
            const double norm = v.norm();
            if (norm > 1e-12)
            {
                constraints.push_back(v / norm);
            }
        }
    }

    model.shape_basis.resize(3 * n, n_shape);
    model.shape_sigmas.resize(n_shape);
    std::vector<Eigen::VectorXd> accepted_shape;
    for (int k = 0; k < n_shape; ++k)
    {
        Eigen::VectorXd field(3 * n);
        for (;;)
        {
            std::array<detail::Bump, 4> bumps;
            for (auto& bump : bumps)
            {
                bump.center = {rng.uniform(-0.8, 0.8), rng.uniform(-0.9, 0.9)};
                bump.width = rng.uniform(0.3, 0.7);
                bump.displacement = {rng.normal(), rng.normal(), rng.normal()};
            }
            for (int i = 0; i < n; ++i)
            {
                Eigen::Vector3d d = Eigen::Vector3d::Zero();
                for (const auto& bump : bumps)
                {
                    const double r2 = (xy[i] - bump.center).squaredNorm();
                    d += bump.displacement * std::exp(-r2 / (2.0 * bump.width * bump.width));
                }
                field.segment<3>(3 * i) = d;
            }
            const double original_norm = field.norm();
            detail::orthogonalise_against(field, constraints);
            detail::orthogonalise_against(field, accepted_shape);
            if (field.norm() > 1e-6 * original_norm)
            {
                break;
            }
        }
        field.normalize();
        accepted_shape.push_back(field);
        model.shape_basis.col(k) = field;
        model.shape_sigmas(k) = 0.08 / (1.0 + 0.5 * k) * std::sqrt(static_cast<double>(n));
    }

    model.expression_basis.resize(3 * n, n_expr);
    for (int j = 0; j < n_expr; ++j)
    {
        auto bumps = detail::expression_template(j, landmarks);
        const double gain = rng.uniform(0.8, 1.2);
        const bool jitter = j >= 8;
        for (auto& bump : bumps)
        {
            bump.displacement *= gain;
            if (jitter)
            {
                bump.center += Eigen::Vector2d(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
                bump.width *= rng.uniform(0.8, 1.25);
            }
        }
        for (int i = 0; i < n; ++i)
        {
            Eigen::Vector3d d = Eigen::Vector3d::Zero();
            for (const auto& bump : bumps)
            {
                const double r2 = (xy[i] - bump.center).squaredNorm();
                d += bump.displacement * std::exp(-r2 / (2.0 * bump.width * bump.width));
            }
            model.expression_basis.col(j).segment<3>(3 * i) = d;
        }
    }

    validate(model);
    return model;
}

} // namespace model
} // namespace flt

#endif /* FLT_MODEL_SYNTHETIC_HPP */
