/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/core/landmarks_io.hpp
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

#ifndef FLT_CORE_LANDMARKS_IO_HPP
#define FLT_CORE_LANDMARKS_IO_HPP

#include "flt/core/io.hpp"
#include "flt/core/landmarks.hpp"

#include "nlohmann/json.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

namespace flt {

/**
 * Landmark interchange format:
 *
 *   {"image_width": W, "image_height": H, "points": [[x, y] x 68], "confidence": [c x 68]}
 *
 * "confidence" is optional. A null coordinate is read as NaN so that a damaged frame survives parsing and
 * is rejected later by validate(), which lets sequence processing record it as a gap.
 */
inline nlohmann::json to_json(const LandmarkSet& landmarks)
{
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : landmarks.points)
    {
        points.push_back({p.x(), p.y()});
    }
    nlohmann::json j = {{"image_width", landmarks.image_width},
                        {"image_height", landmarks.image_height},
                        {"points", points}};
    if (landmarks.confidence)
    {
        j["confidence"] = *landmarks.confidence;
    }
    return j;
}

namespace detail {

inline double coordinate_from_json(const nlohmann::json& value)
{
    if (value.is_null())
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
    if (!value.is_number())
    {
        throw InputError("landmarks: coordinates must be numbers");
    }
    return value.get<double>();
}

} // namespace detail

inline LandmarkSet landmarks_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
    {
        throw InputError("landmarks: expected a JSON object");
    }
    for (const char* key : {"image_width", "image_height", "points"})
    {
        if (!j.contains(key))
        {
            throw InputError(std::string("landmarks: missing field \"") + key + "\"");
        }
    }
    LandmarkSet landmarks;
    try
    {
        landmarks.image_width = j.at("image_width").get<int>();
        landmarks.image_height = j.at("image_height").get<int>();
    } catch (const nlohmann::json::exception&)
    {
        throw InputError("landmarks: image dimensions must be integers");
    }
    const auto& points = j.at("points");
    if (!points.is_array())
    {
        throw InputError("landmarks: \"points\" must be an array");
    }
    for (const auto& p : points)
    {
        if (!p.is_array() || p.size() != 2)
        {
            throw InputError("landmarks: each point must be an [x, y] pair");
        }
        landmarks.points.emplace_back(detail::coordinate_from_json(p[0]), detail::coordinate_from_json(p[1]));
    }
    if (j.contains("confidence") && !j.at("confidence").is_null())
    {
        std::vector<double> confidence;
        for (const auto& c : j.at("confidence"))
        {
            confidence.push_back(detail::coordinate_from_json(c));
        }
        landmarks.confidence = std::move(confidence);
    }
    return landmarks;
}

inline LandmarkSet read_landmarks(const std::filesystem::path& path)
{
    return landmarks_from_json(io::read_json_file(path));
}

inline void write_landmarks(const std::filesystem::path& path, const LandmarkSet& landmarks)
{
    io::write_json_file(path, to_json(landmarks));
}

/**
 * Reads an ordered landmark sequence.
 *
 * \p path may be a file holding a JSON array, a single object, or one object per line, or a directory, in
 * which case every "*.json" file in it is read in lexicographic filename order.
 */
inline std::vector<LandmarkSet> read_landmark_sequence(const std::filesystem::path& path)
{
    std::vector<LandmarkSet> sequence;
    if (std::filesystem::is_directory(path))
    {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(path))
        {
            if (entry.is_regular_file() && entry.path().extension() == ".json")
            {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files)
        {
            sequence.push_back(read_landmarks(file));
        }
        return sequence;
    }
    for (const auto& document : io::parse_json_documents(io::read_text_file(path), path.string()))
    {
        sequence.push_back(landmarks_from_json(document));
    }
    return sequence;
}

} // namespace flt

#endif /* FLT_CORE_LANDMARKS_IO_HPP */
