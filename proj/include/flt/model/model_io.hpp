/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/model/model_io.hpp
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

#ifndef FLT_MODEL_MODEL_IO_HPP
#define FLT_MODEL_MODEL_IO_HPP

#include "flt/core/error.hpp"
#include "flt/core/io.hpp"
#include "flt/model/morphable_model.hpp"

#include "Eigen/Core"
#include "nlohmann/json.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace flt {
namespace model {

/*
 * On-disk model format: a directory holding
 *
 *   model.json  {n_vertices, n_shape, n_expr, landmark_map[68], triangles[[i,j,k],...],
 *                contour_left[...], contour_right[...],
 *                arrays: {mean: "mean.bin", shape: "shape.bin", sigmas: "sigmas.bin", expr: "expr.bin"}}
 *
 * plus the four binary arrays, little-endian float64, bases stored column-major (one 3N column after the
 * other). Array paths are relative to the manifest.
 */

inline constexpr const char* model_manifest_name = "model.json";

namespace detail {

inline void write_float64_le(const std::filesystem::path& path, const double* data, std::size_t count)
{
    std::vector<unsigned char> bytes(count * 8);
    for (std::size_t i = 0; i < count; ++i)
    {
        std::uint64_t bits = std::bit_cast<std::uint64_t>(data[i]);
        for (int b = 0; b < 8; ++b)
        {
            bytes[i * 8 + b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xFFu);
        }
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
    {
        throw IoError("cannot write " + path.string());
    }
    file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!file)
    {
        throw IoError("write failed: " + path.string());
    }
}

inline std::vector<double> read_float64_le(const std::filesystem::path& path, std::size_t expected_count,
                                           const std::string& field)
{
    std::ifstream file(path, std::ios::binary);
    if (!file)
    {
        throw IoError("cannot open " + path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    if (bytes.size() != expected_count * 8)
    {
        throw ValidationError(field, path.filename().string() + " holds " + std::to_string(bytes.size()) +
                                         " bytes, expected " + std::to_string(expected_count * 8));
    }
    std::vector<double> values(expected_count);
    for (std::size_t i = 0; i < expected_count; ++i)
    {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b)
        {
            bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        }
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

template <class T>
T manifest_get(const nlohmann::json& manifest, const char* key)
{
    if (!manifest.contains(key))
    {
        throw ValidationError(key, "missing from manifest");
    }
    try
    {
        return manifest.at(key).get<T>();
    } catch (const nlohmann::json::exception&)
    {
        throw ValidationError(key, "has the wrong type");
    }
}

} // namespace detail

/**
 * Writes \p model into \p directory (created if needed) as model.json plus binary arrays.
 *
 * The output is a deterministic function of the model, so save/load/save round trips are byte-identical.
 */
inline void save_model(const MorphableModel& model, const std::filesystem::path& directory)
{
    validate(model);
    std::filesystem::create_directories(directory);

    nlohmann::json triangles = nlohmann::json::array();
    for (const auto& tri : model.triangles)
    {
        triangles.push_back({tri[0], tri[1], tri[2]});
    }
    const nlohmann::json manifest = {
        {"n_vertices", model.num_vertices()},
        {"n_shape", model.num_shape_coefficients()},
        {"n_expr", model.num_expression_coefficients()},
        {"landmark_map", model.landmark_map},
        {"triangles", triangles},
        {"contour_left", model.contour_left},
        {"contour_right", model.contour_right},
        {"arrays", {{"mean", "mean.bin"}, {"shape", "shape.bin"}, {"sigmas", "sigmas.bin"}, {"expr", "expr.bin"}}}};
    io::write_json_file(directory / model_manifest_name, manifest);

    // Eigen's default storage is column-major, which is the on-disk layout.
    detail::write_float64_le(directory / "mean.bin", model.mean_shape.data(), model.mean_shape.size());
    detail::write_float64_le(directory / "shape.bin", model.shape_basis.data(), model.shape_basis.size());
    detail::write_float64_le(directory / "sigmas.bin", model.shape_sigmas.data(), model.shape_sigmas.size());
    detail::write_float64_le(directory / "expr.bin", model.expression_basis.data(), model.expression_basis.size());
}

/**
 * Loads a model from a directory containing model.json, or from the path of the manifest itself.
 *
 * All MorphableModel invariants are checked; violations throw a ValidationError naming the field.
 * Missing files throw IoError.
 */
inline MorphableModel load_model(const std::filesystem::path& path)
{
    const std::filesystem::path manifest_path =
        std::filesystem::is_directory(path) ? path / model_manifest_name : path;
    if (!std::filesystem::exists(manifest_path))
    {
        throw IoError("model manifest not found: " + manifest_path.string());
    }
    const auto base = manifest_path.parent_path();

    nlohmann::json manifest;
    try
    {
        manifest = nlohmann::json::parse(io::read_text_file(manifest_path));
    } catch (const nlohmann::json::parse_error& e)
    {
        throw ValidationError("manifest", std::string("malformed JSON: ") + e.what());
    }
    if (!manifest.is_object())
    {
        throw ValidationError("manifest", "must be a JSON object");
    }

    const auto n = detail::manifest_get<long long>(manifest, "n_vertices");
    const auto m = detail::manifest_get<long long>(manifest, "n_shape");
    const auto k = detail::manifest_get<long long>(manifest, "n_expr");
    if (n <= 0)
    {
        throw ValidationError("n_vertices", "must be positive");
    }
    if (m <= 0)
    {
        throw ValidationError("n_shape", "must be positive");
    }
    if (k < 0)
    {
        throw ValidationError("n_expr", "must be non-negative");
    }

    MorphableModel model;
    model.landmark_map = detail::manifest_get<std::vector<int>>(manifest, "landmark_map");
    model.contour_left = detail::manifest_get<std::vector<int>>(manifest, "contour_left");
    model.contour_right = detail::manifest_get<std::vector<int>>(manifest, "contour_right");
    const auto triangles = detail::manifest_get<std::vector<std::vector<int>>>(manifest, "triangles");
    model.triangles.reserve(triangles.size());
    for (const auto& tri : triangles)
    {
        if (tri.size() != 3)
        {
            throw ValidationError("triangles", "every triangle needs exactly three indices");
        }
        model.triangles.push_back({tri[0], tri[1], tri[2]});
    }

    const auto arrays = detail::manifest_get<nlohmann::json>(manifest, "arrays");
    const auto array_path = [&](const char* key) {
        if (!arrays.is_object() || !arrays.contains(key) || !arrays.at(key).is_string())
        {
            throw ValidationError(std::string("arrays.") + key, "missing array path");
        }
        return base / arrays.at(key).get<std::string>();
    };

    const auto rows = static_cast<std::size_t>(3 * n);
    const auto mean = detail::read_float64_le(array_path("mean"), rows, "mean_shape");
    const auto shape = detail::read_float64_le(array_path("shape"), rows * m, "shape_basis");
    const auto sigmas = detail::read_float64_le(array_path("sigmas"), static_cast<std::size_t>(m), "shape_sigmas");
    const auto expr = detail::read_float64_le(array_path("expr"), rows * k, "expression_basis");

    model.mean_shape = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(rows));
    model.shape_basis = Eigen::Map<const Eigen::MatrixXd>(shape.data(), static_cast<Eigen::Index>(rows), m);
    model.shape_sigmas = Eigen::Map<const Eigen::VectorXd>(sigmas.data(), m);
    model.expression_basis = Eigen::Map<const Eigen::MatrixXd>(expr.data(), static_cast<Eigen::Index>(rows), k);

    validate(model);
    return model;
}

} // namespace model
} // namespace flt

#endif /* FLT_MODEL_MODEL_IO_HPP */
