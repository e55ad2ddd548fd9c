/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/render/texture.hpp
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

#ifndef FLT_RENDER_TEXTURE_HPP
#define FLT_RENDER_TEXTURE_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"
#include "flt/fitting/fit_config.hpp"
#include "flt/model/morphable_model.hpp"
#include "flt/render/image.hpp"
#include "flt/render/rasterizer.hpp"

#include "Eigen/Core"
#include "Eigen/Geometry"

#include <algorithm>
#include <vector>

namespace flt {
namespace render {

/// Area-weighted vertex normals; with outward-wound triangles they point out of the surface.
inline std::vector<Eigen::Vector3d> vertex_normals(const model::Mesh& mesh)
{
    std::vector<Eigen::Vector3d> normals(mesh.num_vertices(), Eigen::Vector3d::Zero());
    detail::check_triangles(mesh.triangles, mesh.num_vertices());
    for (const auto& tri : mesh.triangles)
    {
        const Eigen::Vector3d a = mesh.vertex(tri[0]);
        const Eigen::Vector3d face = (mesh.vertex(tri[1]) - a).cross(mesh.vertex(tri[2]) - a);
        for (int v : tri)
        {
            normals[v] += face;
        }
    }
    for (auto& n : normals)
    {
        const double length = n.norm();
        if (length > 0.0)
        {
            n /= length;
        }
    }
    return normals;
}

/**
 * Uses the reference image as a projective texture for the fitted reference mesh.
 *
 * Each vertex's UV is its projection under the reference pose divided by the image size. UVs outside
 * [0, 1]^2 are clamped and flagged out_of_bounds; vertices whose normal faces away from the reference
 * camera (or that belong to no triangle) are flagged untextured.
 */
inline Texture bake_reference_texture(const model::MorphableModel& model, const fitting::FitResult& fit_ref,
                                      const Image& reference_image)
{
    if (reference_image.empty())
    {
        throw ArgumentError("bake_reference_texture: empty reference image");
    }
    const auto mesh = model::evaluate_mesh(model, fit_ref.shape_coeffs, fit_ref.expr_coeffs);
    const auto normals = vertex_normals(mesh);
    const auto n = static_cast<std::size_t>(mesh.num_vertices());

    Texture texture;
    texture.image = reference_image;
    texture.uvs.resize(n);
    texture.textured.assign(n, false);
    texture.out_of_bounds.assign(n, false);
    const Eigen::Vector2d size(reference_image.width, reference_image.height);
    for (std::size_t i = 0; i < n; ++i)
    {
        const Eigen::Vector2d uv =
            camera::project(fit_ref.pose, mesh.vertex(static_cast<int>(i))).cwiseQuotient(size);
        texture.uvs[i] = uv.cwiseMax(0.0).cwiseMin(1.0);
        texture.out_of_bounds[i] = texture.uvs[i] != uv;
        const double facing = fit_ref.pose.rotation.row(2).dot(normals[i]);
        texture.textured[i] = normals[i].squaredNorm() > 0.0 && facing < 0.0;
    }
    return texture;
}

} // namespace render
} // namespace flt

#endif /* FLT_RENDER_TEXTURE_HPP */
