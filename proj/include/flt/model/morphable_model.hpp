/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/model/morphable_model.hpp
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

#ifndef FLT_MODEL_MORPHABLE_MODEL_HPP
#define FLT_MODEL_MORPHABLE_MODEL_HPP

#include "flt/core/error.hpp"
#include "flt/core/landmarks.hpp"

#include "Eigen/Core"

#include <array>
#include <cmath>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace flt {
namespace model {

/// Vertex indices of one triangle, counter-clockwise when seen from the front (outward normal).
using Triangle = std::array<int, 3>;

/**
 * A linear 3D Morphable Model: a mean shape, an orthonormal PCA shape basis with per-component standard
 * deviations, and a set of additive expression blendshapes.
 *
 * Vertex data is stored flat and xyz-interleaved (x0, y0, z0, x1, ...), so every basis column has 3N
 * rows. Model space is dimensionless, with x to the right, y down and z pointing away from a viewer
 * that looks at the face from the front.
 */
struct MorphableModel
{
    Eigen::VectorXd mean_shape;       ///< 3N
    Eigen::MatrixXd shape_basis;      ///< 3N x M, unit-norm columns
    Eigen::VectorXd shape_sigmas;     ///< M, strictly positive
    Eigen::MatrixXd expression_basis; ///< 3N x K, delta blendshapes
    std::vector<Triangle> triangles;
    std::vector<int> landmark_map;  ///< 68 distinct vertex indices
    std::vector<int> contour_left;  ///< jaw candidates on the image-left side (landmarks 0-8)
    std::vector<int> contour_right; ///< jaw candidates on the image-right side (landmarks 8-16)

    int num_vertices() const { return static_cast<int>(mean_shape.size() / 3); }
    int num_shape_coefficients() const { return static_cast<int>(shape_basis.cols()); }
    int num_expression_coefficients() const { return static_cast<int>(expression_basis.cols()); }

    Eigen::Vector3d mean_vertex(int index) const { return mean_shape.segment<3>(3 * index); }
};

namespace detail {
template <class Derived, class Other>
bool same_matrix(const Eigen::MatrixBase<Derived>& a, const Eigen::MatrixBase<Other>& b)
{
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
}
} // namespace detail

/// Exact field-by-field equality.
inline bool operator==(const MorphableModel& a, const MorphableModel& b)
{
    return detail::same_matrix(a.mean_shape, b.mean_shape) && detail::same_matrix(a.shape_basis, b.shape_basis) &&
           detail::same_matrix(a.shape_sigmas, b.shape_sigmas) &&
           detail::same_matrix(a.expression_basis, b.expression_basis) && a.triangles == b.triangles &&
           a.landmark_map == b.landmark_map && a.contour_left == b.contour_left &&
           a.contour_right == b.contour_right;
}

/// A face mesh instance; vertices are 3N xyz-interleaved, triangles are the model's.
struct Mesh
{
    Eigen::VectorXd vertices;
    std::vector<Triangle> triangles;

    int num_vertices() const { return static_cast<int>(vertices.size() / 3); }
    Eigen::Vector3d vertex(int index) const { return vertices.segment<3>(3 * index); }
};

/**
 * Checks every MorphableModel invariant and throws a ValidationError naming the first offending field.
 */
inline void validate(const MorphableModel& model)
{
    const auto n_rows = model.mean_shape.size();
    if (n_rows == 0 || n_rows % 3 != 0)
    {
        throw ValidationError("mean_shape", "length must be a positive multiple of 3");
    }
    if (!model.mean_shape.allFinite())
    {
        throw ValidationError("mean_shape", "contains non-finite values");
    }
    const int n = model.num_vertices();
    if (model.shape_basis.rows() != n_rows)
    {
        throw ValidationError("shape_basis", "columns must have length 3N");
    }
    if (model.shape_basis.cols() < 1)
    {
        throw ValidationError("shape_basis", "needs at least one component");
    }
    if (!model.shape_basis.allFinite())
    {
        throw ValidationError("shape_basis", "contains non-finite values");
    }
    for (Eigen::Index k = 0; k < model.shape_basis.cols(); ++k)
    {
        if (std::abs(model.shape_basis.col(k).norm() - 1.0) > 1e-9)
        {
            throw ValidationError("shape_basis", "column " + std::to_string(k) + " is not unit norm");
        }
    }
    if (model.shape_sigmas.size() != model.shape_basis.cols())
    {
        throw ValidationError("shape_sigmas", "must have one entry per shape component");
    }
    for (Eigen::Index k = 0; k < model.shape_sigmas.size(); ++k)
    {
        if (!(model.shape_sigmas(k) > 0.0) || !std::isfinite(model.shape_sigmas(k)))
        {
            throw ValidationError("shape_sigmas", "entry " + std::to_string(k) + " is not strictly positive");
        }
    }
    if (model.expression_basis.rows() != n_rows)
    {
        throw ValidationError("expression_basis", "columns must have length 3N");
    }
    if (!model.expression_basis.allFinite())
    {
        throw ValidationError("expression_basis", "contains non-finite values");
    }
    for (const auto& tri : model.triangles)
    {
        for (int index : tri)
        {
            if (index < 0 || index >= n)
            {
                throw ValidationError("triangles", "vertex index " + std::to_string(index) + " out of range");
            }
        }
    }
    if (model.landmark_map.size() != num_landmarks)
    {
        throw ValidationError("landmark_map", "must have 68 entries");
    }
    std::set<int> distinct;
    for (int index : model.landmark_map)
    {
        if (index < 0 || index >= n)
        {
            throw ValidationError("landmark_map", "vertex index " + std::to_string(index) + " out of range");
        }
        if (!distinct.insert(index).second)
        {
            throw ValidationError("landmark_map", "duplicate vertex index " + std::to_string(index));
        }
    }
    for (const auto* ring : {&model.contour_left, &model.contour_right})
    {
        for (int index : *ring)
        {
            if (index < 0 || index >= n)
            {
                throw ValidationError(ring == &model.contour_left ? "contour_left" : "contour_right",
                                      "vertex index " + std::to_string(index) + " out of range");
            }
        }
    }
}

/**
 * Evaluates the linear model: the mean shape plus the shape basis weighted by \p shape_coeffs plus the
 * expression blendshapes weighted by \p expr_coeffs.
 *
 * @param[in] model The morphable model.
 * @param[in] shape_coeffs M shape coefficients (not normalised by the sigmas).
 * @param[in] expr_coeffs K blendshape coefficients.
 * @return The mesh instance. Zero coefficients return the mean shape bit-for-bit.
 */
inline Mesh evaluate_mesh(const MorphableModel& model, const Eigen::VectorXd& shape_coeffs,
                          const Eigen::VectorXd& expr_coeffs)
{
    if (shape_coeffs.size() != model.shape_basis.cols())
    {
        throw DimensionError("evaluate_mesh: expected " + std::to_string(model.shape_basis.cols()) +
                             " shape coefficients, got " + std::to_string(shape_coeffs.size()));
    }
    if (expr_coeffs.size() != model.expression_basis.cols())
    {
        throw DimensionError("evaluate_mesh: expected " + std::to_string(model.expression_basis.cols()) +
                             " expression coefficients, got " + std::to_string(expr_coeffs.size()));
    }
    Mesh mesh;
    mesh.vertices = model.mean_shape;
    if (!shape_coeffs.isZero(0.0))
    {
        mesh.vertices.noalias() += model.shape_basis * shape_coeffs;
    }
    if (!expr_coeffs.isZero(0.0))
    {
        mesh.vertices.noalias() += model.expression_basis * expr_coeffs;
    }
    mesh.triangles = model.triangles;
    return mesh;
}

/// Mesh vertices at the given vertex indices, in order.
inline Points3 vertices_at(const Mesh& mesh, std::span<const int> vertex_indices)
{
    Points3 points;
    points.reserve(vertex_indices.size());
    for (int index : vertex_indices)
    {
        if (index < 0 || index >= mesh.num_vertices())
        {
            throw DimensionError("vertex index " + std::to_string(index) + " out of range");
        }
        points.push_back(mesh.vertex(index));
    }
    return points;
}

/**
 * The 68 landmark positions of \p mesh, following the model's landmark map (or \p landmark_map, when
 * given, e.g. after contour re-correspondence).
 */
inline Points3 landmark_positions(const MorphableModel& model, const Mesh& mesh,
                                  std::span<const int> landmark_map = {})
{
    if (mesh.num_vertices() != model.num_vertices())
    {
        throw DimensionError("landmark_positions: mesh has " + std::to_string(mesh.num_vertices()) +
                             " vertices, model has " + std::to_string(model.num_vertices()));
    }
    return vertices_at(mesh, landmark_map.empty() ? std::span<const int>(model.landmark_map) : landmark_map);
}

/// Interocular distance of the mean shape, the unit all model-space tolerances are expressed in.
inline double mean_interocular_distance(const MorphableModel& model)
{
    return (model.mean_vertex(model.landmark_map[outer_eye_corner_left]) -
            model.mean_vertex(model.landmark_map[outer_eye_corner_right]))
        .norm();
}

} // namespace model
} // namespace flt

#endif /* FLT_MODEL_MORPHABLE_MODEL_HPP */
