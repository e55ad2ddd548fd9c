/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/core/io.hpp
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

#ifndef FLT_CORE_IO_HPP
#define FLT_CORE_IO_HPP

#include "flt/core/error.hpp"

#include "nlohmann/json.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace flt {
namespace io {

inline std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file)
    {
        throw IoError("cannot open " + path.string());
    }
    return std::string(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
}

inline void write_text_file(const std::filesystem::path& path, const std::string& contents)
{
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
    {
        throw IoError("cannot write " + path.string());
    }
    file << contents;
    if (!file)
    {
        throw IoError("write failed: " + path.string());
    }
}

inline nlohmann::json read_json_file(const std::filesystem::path& path)
{
    const std::string text = read_text_file(path);
    try
    {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e)
    {
        throw InputError(path.string() + ": malformed JSON (" + e.what() + ")");
    }
}

/// Pretty-printed JSON with a trailing newline.
inline void write_json_file(const std::filesystem::path& path, const nlohmann::json& value)
{
    write_text_file(path, value.dump(2) + "\n");
}

/**
 * Parses either a single JSON document or a stream with one JSON document per line.
 *
 * A top-level array is flattened into its elements; a single object yields one element.
 */
inline std::vector<nlohmann::json> parse_json_documents(const std::string& text, const std::string& origin)
{
    std::vector<nlohmann::json> documents;
    try
    {
        const auto whole = nlohmann::json::parse(text);
        if (whole.is_array())
        {
            for (const auto& element : whole)
            {
                documents.push_back(element);
            }
        } else
        {
            documents.push_back(whole);
        }
        return documents;
    } catch (const nlohmann::json::parse_error&)
    {
        // fall through to line-delimited parsing
    }
    std::istringstream lines(text);
    std::string line;
    int line_number = 0;
    while (std::getline(lines, line))
    {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            continue;
        }
        try
        {
            documents.push_back(nlohmann::json::parse(line));
        } catch (const nlohmann::json::parse_error& e)
        {
            throw InputError(origin + ":" + std::to_string(line_number) + ": malformed JSON (" + e.what() +
                             ")");
        }
    }
    return documents;
}

} // namespace io
} // namespace flt

#endif /* FLT_CORE_IO_HPP */
