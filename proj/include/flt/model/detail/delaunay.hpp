/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/model/detail/delaunay.hpp
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

#ifndef FLT_MODEL_DETAIL_DELAUNAY_HPP
#define FLT_MODEL_DETAIL_DELAUNAY_HPP

#include "Eigen/Core"

#include <algorithm>
#include <array>
#include <span>
#include <utility>
#include <vector>

namespace flt {
namespace model {
namespace detail {

/**
 * Bowyer-Watson Delaunay triangulation of distinct 2D points, O(n^2).
 *
 * Returned triangles index into \p points and are counter-clockwise in the usual y-up sense (positive
 * signed area). Only meant for the few thousand points of a synthetic test face.
 */
inline std::vector<std::array<int, 3>> delaunay_triangulation(std::span<const Eigen::Vector2d> points)
{
    const int n = static_cast<int>(points.size());
    if (n < 3)
    {
        return {};
    }

    std::vector<Eigen::Vector2d> p(points.begin(), points.end());
    Eigen::Vector2d lo = p[0], hi = p[0];
    for (const auto& q : p)
    {
        lo = lo.cwiseMin(q);
        hi = hi.cwiseMax(q);
    }
    const Eigen::Vector2d center = 0.5 * (lo + hi);
    const double extent = std::max((hi - lo).maxCoeff(), 1e-12);
    // Super triangle, far enough out that it does not disturb the hull.
    p.emplace_back(center.x() - 40.0 * extent, center.y() - 30.0 * extent);
    p.emplace_back(center.x() + 40.0 * extent, center.y() - 30.0 * extent);
    p.emplace_back(center.x(), center.y() + 40.0 * extent);

    struct Tri
    {
        std::array<int, 3> v;
        Eigen::Vector2d circumcenter;
        double radius2;
    };
    const auto make_tri = [&p](int a, int b, int c) {
        const Eigen::Vector2d& A = p[a];
        const Eigen::Vector2d& B = p[b];
        const Eigen::Vector2d& C = p[c];
        const double d = 2.0 * (A.x() * (B.y() - C.y()) + B.x() * (C.y() - A.y()) + C.x() * (A.y() - B.y()));
        const double a2 = A.squaredNorm(), b2 = B.squaredNorm(), c2 = C.squaredNorm();
        const Eigen::Vector2d cc((a2 * (B.y() - C.y()) + b2 * (C.y() - A.y()) + c2 * (A.y() - B.y())) / d,
                                 (a2 * (C.x() - B.x()) + b2 * (A.x() - C.x()) + c2 * (B.x() - A.x())) / d);
        return Tri{{a, b, c}, cc, (A - cc).squaredNorm()};
    };

    std::vector<Tri> triangles{make_tri(n, n + 1, n + 2)};
    std::vector<std::pair<int, int>> polygon;
    std::vector<Tri> kept;
    for (int i = 0; i < n; ++i)
    {
        polygon.clear();
        kept.clear();
        for (const auto& t : triangles)
        {
            if ((p[i] - t.circumcenter).squaredNorm() < t.radius2)
            {
                for (int e = 0; e < 3; ++e)
                {
                    polygon.emplace_back(t.v[e], t.v[(e + 1) % 3]);
                }
            } else
            {
                kept.push_back(t);
            }
        }
        // The cavity boundary consists of the edges that belong to exactly one bad triangle.
        for (std::size_t e = 0; e < polygon.size(); ++e)
        {
            bool shared = false;
            for (std::size_t f = 0; f < polygon.size(); ++f)
            {
                if (e != f && polygon[e].first == polygon[f].second && polygon[e].second == polygon[f].first)
                {
                    shared = true;
                    break;
                }
            }
            if (!shared)
            {
                kept.push_back(make_tri(polygon[e].first, polygon[e].second, i));
            }
        }
        triangles.swap(kept);
    }

    std::vector<std::array<int, 3>> result;
    for (const auto& t : triangles)
    {
        if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n)
        {
            continue;
        }
        auto v = t.v;
        const Eigen::Vector2d e1 = points[v[1]] - points[v[0]];
        const Eigen::Vector2d e2 = points[v[2]] - points[v[0]];
        if (e1.x() * e2.y() - e1.y() * e2.x() < 0.0)
        {
            std::swap(v[1], v[2]);
        }
        result.push_back(v);
    }
    std::sort(result.begin(), result.end());
    return result;
}

} // namespace detail
} // namespace model
} // namespace flt

#endif /* FLT_MODEL_DETAIL_DELAUNAY_HPP */
