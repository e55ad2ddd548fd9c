/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/render/rasterizer.hpp
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

#ifndef FLT_RENDER_RASTERIZER_HPP
#define FLT_RENDER_RASTERIZER_HPP

#include "flt/camera/pose.hpp"
#include "flt/core/error.hpp"
#include "flt/model/morphable_model.hpp"
#include "flt/render/image.hpp"

#include "Eigen/Core"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace flt {
namespace render {

inline constexpr std::uint8_t untextured_gray = 128;

/// Colour and depth of one rendered frame. Depth is camera-space z; background pixels hold +infinity.
struct RenderedFace
{
    int width = 0;
    int height = 0;
    Image color;
    std::vector<double> depth;
};

/**
 * Texture source for rasterize(): an image plus one UV per mesh vertex. Triangles touching a vertex whose
 * textured flag is false are drawn flat mid-gray.
 */
struct Texture
{
    Image image;
    std::vector<Eigen::Vector2d> uvs;
    std::vector<bool> textured;
    std::vector<bool> out_of_bounds;
};

namespace detail {

/// Twice the signed area of (a, b, p); positive when p is to the right of a->b on a y-down screen.
inline double edge_function(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) noexcept
{
    return (b.x() - a.x()) * (p.y() - a.y()) - (b.y() - a.y()) * (p.x() - a.x());
}

/// Top-left fill rule for an edge of a positively oriented triangle (y-down screen).
inline bool is_top_left(const Eigen::Vector2d& a, const Eigen::Vector2d& b) noexcept
{
    const double dx = b.x() - a.x();
    const double dy = b.y() - a.y();
    return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

/**
 * Scan-converts the front-facing triangles into the pixel window [x0, x0 + width) x [y0, y0 + height),
 * sampling at pixel centres. A triangle is front-facing when its screen-space winding is counter-clockwise
 * as displayed (negative cross product with y pointing down). For every fragment strictly nearer than the
 * current z-buffer entry, the buffer is updated and shade(pixel_index, triangle_index, barycentrics) is
 * called, with barycentrics ordered like the triangle's vertices.
 */
template <typename Shade>
void scan_triangles(std::span<const Eigen::Vector2d> screen, std::span<const double> depths,
                    std::span<const model::Triangle> triangles, int x0, int y0, int width, int height,
                    std::vector<double>& zbuffer, Shade&& shade)
{
    for (std::size_t t = 0; t < triangles.size(); ++t)
    {
        std::array<int, 3> v = triangles[t];
        std::array<int, 3> slot = {0, 1, 2};
        const double signed_area = edge_function(screen[v[0]], screen[v[1]], screen[v[2]]);
        if (!(signed_area < 0.0) || !std::isfinite(signed_area))
        {
            continue; // back-facing or degenerate
        }
        std::swap(v[1], v[2]);
        std::swap(slot[1], slot[2]);
        const double area = -signed_area;
        const Eigen::Vector2d& a = screen[v[0]];
        const Eigen::Vector2d& b = screen[v[1]];
        const Eigen::Vector2d& c = screen[v[2]];

        const double min_x = std::min({a.x(), b.x(), c.x()});
        const double max_x = std::max({a.x(), b.x(), c.x()});
        const double min_y = std::min({a.y(), b.y(), c.y()});
        const double max_y = std::max({a.y(), b.y(), c.y()});
        // Pixel centres px + 0.5 inside the bounding box, clipped to the window.
        const double bx0 = std::max(std::ceil(min_x - 0.5), static_cast<double>(x0));
        const double bx1 = std::min(std::floor(max_x - 0.5), static_cast<double>(x0 + width - 1));
        const double by0 = std::max(std::ceil(min_y - 0.5), static_cast<double>(y0));
        const double by1 = std::min(std::floor(max_y - 0.5), static_cast<double>(y0 + height - 1));
        if (!(bx0 <= bx1) || !(by0 <= by1))
        {
            continue;
        }
        const int px_begin = static_cast<int>(bx0);
        const int px_end = static_cast<int>(bx1);
        const int py_begin = static_cast<int>(by0);
        const int py_end = static_cast<int>(by1);

        const bool top_left_a = is_top_left(b, c);
        const bool top_left_b = is_top_left(c, a);
        const bool top_left_c = is_top_left(a, b);
        for (int py = py_begin; py <= py_end; ++py)
        {
            for (int px = px_begin; px <= px_end; ++px)
            {
                const Eigen::Vector2d p(px + 0.5, py + 0.5);
                const double wa = edge_function(b, c, p);
                const double wb = edge_function(c, a, p);
                const double wc = edge_function(a, b, p);
                if (wa < 0.0 || wb < 0.0 || wc < 0.0)
                {
                    continue;
                }
                if ((wa == 0.0 && !top_left_a) || (wb == 0.0 && !top_left_b) || (wc == 0.0 && !top_left_c))
                {
                    continue;
                }
                const double z = (wa * depths[v[0]] + wb * depths[v[1]] + wc * depths[v[2]]) / area;
                const std::size_t index = static_cast<std::size_t>(py - y0) * width + (px - x0);
                if (z < zbuffer[index])
                {
                    zbuffer[index] = z;
                    std::array<double, 3> bary{};
                    bary[slot[0]] = wa / area;
                    bary[slot[1]] = wb / area;
                    bary[slot[2]] = wc / area;
                    shade(index, t, bary);
                }
            }
        }
    }
}

inline void check_triangles(std::span<const model::Triangle> triangles, int n_vertices)
{
    for (const auto& tri : triangles)
    {
        for (int v : tri)
        {
            if (v < 0 || v >= n_vertices)
            {
                throw DimensionError("triangle references vertex " + std::to_string(v) + " of " +
                                     std::to_string(n_vertices));
            }
        }
    }
}

inline std::uint8_t sample_channel(const Image& image, const Eigen::Vector2d& uv, int channel)
{
    const int x = std::clamp(static_cast<int>(std::floor(uv.x() * image.width)), 0, image.width - 1);
    const int y = std::clamp(static_cast<int>(std::floor(uv.y() * image.height)), 0, image.height - 1);
    return image.pixel(x, y)[channel];
}

} // namespace detail

/**
 * Renders \p mesh under \p pose into a width x height frame.
 *
 * Front-facing triangles are filled with a strictly-nearer z-test at pixel centres (top-left rule on shared
 * edges). Without a texture, foreground is flat mid-gray; with one, colours are sampled nearest-neighbour at
 * the interpolated UV. The background is black at depth +infinity.
 */
inline RenderedFace rasterize(const model::Mesh& mesh, const camera::Pose& pose, int width, int height,
                              const Texture* texture = nullptr)
{
    if (width < 1 || height < 1)
    {
        throw ArgumentError("rasterize: width and height must be at least 1");
    }
    const int n = mesh.num_vertices();
    detail::check_triangles(mesh.triangles, n);
    if (texture && (texture->uvs.size() != static_cast<std::size_t>(n) ||
                    texture->textured.size() != static_cast<std::size_t>(n) || texture->image.empty()))
    {
        throw DimensionError("rasterize: texture does not match the mesh");
    }

    RenderedFace out;
    out.width = width;
    out.height = height;
    out.color = Image(width, height);
    out.depth.assign(static_cast<std::size_t>(width) * height, std::numeric_limits<double>::infinity());

    Points2 screen(n);
    std::vector<double> depths(n);
    for (int i = 0; i < n; ++i)
    {
        screen[i] = camera::project(pose, mesh.vertex(i));
        depths[i] = camera::depth(pose, mesh.vertex(i));
    }

    detail::scan_triangles(screen, depths, mesh.triangles, 0, 0, width, height, out.depth,
                           [&](std::size_t index, std::size_t t, const std::array<double, 3>& bary) {
                               std::uint8_t* rgb = out.color.data.data() + 3 * index;
                               const auto& tri = mesh.triangles[t];
                               if (!texture || !texture->textured[tri[0]] || !texture->textured[tri[1]] ||
                                   !texture->textured[tri[2]])
                               {
                                   rgb[0] = rgb[1] = rgb[2] = untextured_gray;
                                   return;
                               }
                               const Eigen::Vector2d uv = bary[0] * texture->uvs[tri[0]] +
                                                          bary[1] * texture->uvs[tri[1]] +
                                                          bary[2] * texture->uvs[tri[2]];
                               for (int ch = 0; ch < 3; ++ch)
                               {
                                   rgb[ch] = detail::sample_channel(texture->image, uv, ch);
                               }
                           });
    return out;
}

/// Depth of the pixel containing (x, y); +infinity outside the frame.
inline double depth_at(const RenderedFace& rendered, double x, double y)
{
    if (!(x >= 0.0) || !(y >= 0.0) || !(x < rendered.width) || !(y < rendered.height))
    {
        return std::numeric_limits<double>::infinity();
    }
    const auto ix = static_cast<std::size_t>(x);
    const auto iy = static_cast<std::size_t>(y);
    return rendered.depth[iy * rendered.width + ix];
}

/**
 * A z-buffer over an arbitrary pixel window, used for visibility tests independent of any image size.
 */
struct DepthWindow
{
    int x0 = 0;
    int y0 = 0;
    int width = 0;
    int height = 0;
    std::vector<double> depth;

    /// Depth at absolute pixel (x, y); +infinity outside the window.
    double at(int x, int y) const
    {
        if (x < x0 || y < y0 || x >= x0 + width || y >= y0 + height)
        {
            return std::numeric_limits<double>::infinity();
        }
        return depth[static_cast<std::size_t>(y - y0) * width + (x - x0)];
    }
};

/// Z-buffer of \p mesh under \p pose, covering the projected bounding box plus a one-pixel margin.
inline DepthWindow render_depth_window(const model::Mesh& mesh, const camera::Pose& pose)
{
    const int n = mesh.num_vertices();
    detail::check_triangles(mesh.triangles, n);
    DepthWindow window;
    if (n == 0)
    {
        return window;
    }
    Points2 screen(n);
    std::vector<double> depths(n);
    Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (int i = 0; i < n; ++i)
    {
        screen[i] = camera::project(pose, mesh.vertex(i));
        depths[i] = camera::depth(pose, mesh.vertex(i));
        lo = lo.cwiseMin(screen[i]);
        hi = hi.cwiseMax(screen[i]);
    }
    if (!lo.allFinite() || !hi.allFinite())
    {
        throw ArgumentError("render_depth_window: non-finite projected vertices");
    }
    window.x0 = static_cast<int>(std::floor(lo.x())) - 1;
    window.y0 = static_cast<int>(std::floor(lo.y())) - 1;
    window.width = static_cast<int>(std::floor(hi.x())) + 2 - window.x0;
    window.height = static_cast<int>(std::floor(hi.y())) + 2 - window.y0;
    window.depth.assign(static_cast<std::size_t>(window.width) * window.height,
                        std::numeric_limits<double>::infinity());
    detail::scan_triangles(screen, depths, mesh.triangles, window.x0, window.y0, window.width, window.height,
                           window.depth, [](std::size_t, std::size_t, const std::array<double, 3>&) {});
    return window;
}

/// Encodes the depth buffer as: uint32 width, uint32 height, then width*height float32, all little-endian.
inline std::string encode_depth_dump(const RenderedFace& rendered)
{
    std::string out;
    out.reserve(8 + 4 * rendered.depth.size());
    const auto put32 = [&out](std::uint32_t word) {
        for (int shift = 0; shift < 32; shift += 8)
        {
            out.push_back(static_cast<char>((word >> shift) & 0xFFu));
        }
    };
    put32(static_cast<std::uint32_t>(rendered.width));
    put32(static_cast<std::uint32_t>(rendered.height));
    for (double d : rendered.depth)
    {
        put32(std::bit_cast<std::uint32_t>(static_cast<float>(d)));
    }
    return out;
}

inline void write_depth_dump(const std::filesystem::path& path, const RenderedFace& rendered)
{
    std::ofstream file(path, std::ios::binary);
    if (!file)
    {
        throw IoError("cannot open \"" + path.string() + "\" for writing");
    }
    const auto bytes = encode_depth_dump(rendered);
    file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!file)
    {
        throw IoError("failed writing \"" + path.string() + "\"");
    }
}

} // namespace render
} // namespace flt

#endif /* FLT_RENDER_RASTERIZER_HPP */
