/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/render/image.hpp
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

#ifndef FLT_RENDER_IMAGE_HPP
#define FLT_RENDER_IMAGE_HPP

#include "flt/core/error.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace flt {
namespace render {

/// 8-bit RGB image, row-major, three interleaved channels.
struct Image
{
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int width, int height, std::array<std::uint8_t, 3> fill = {0, 0, 0})
        : width(width), height(height), data(static_cast<std::size_t>(width) * height * 3)
    {
        for (std::size_t i = 0; i < data.size(); i += 3)
        {
            data[i] = fill[0];
            data[i + 1] = fill[1];
            data[i + 2] = fill[2];
        }
    }

    bool empty() const noexcept { return width <= 0 || height <= 0; }

    std::uint8_t* pixel(int x, int y) noexcept { return data.data() + 3 * (static_cast<std::size_t>(y) * width + x); }
    const std::uint8_t* pixel(int x, int y) const noexcept
    {
        return data.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// Encodes \p image as binary PPM (P6, maxval 255).
inline std::string encode_ppm(const Image& image)
{
    std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.data.data()), image.data.size());
    return out;
}

inline void write_ppm(const std::filesystem::path& path, const Image& image)
{
    std::ofstream file(path, std::ios::binary);
    if (!file)
    {
        throw IoError("cannot open \"" + path.string() + "\" for writing");
    }
    const auto bytes = encode_ppm(image);
    file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!file)
    {
        throw IoError("failed writing \"" + path.string() + "\"");
    }
}

/// Decodes a binary PPM (P6) with maxval 255; header comments are skipped.
inline Image decode_ppm(const std::string& bytes, const std::string& origin = "image")
{
    std::size_t pos = 0;
    const auto fail = [&](const std::string& why) { return InputError(origin + ": " + why); };
    const auto next_token = [&]() {
        while (pos < bytes.size())
        {
            if (bytes[pos] == '#')
            {
                while (pos < bytes.size() && bytes[pos] != '\n')
                {
                    ++pos;
                }
            } else if (std::isspace(static_cast<unsigned char>(bytes[pos])))
            {
                ++pos;
            } else
            {
                break;
            }
        }
        const std::size_t start = pos;
        while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) && bytes[pos] != '#')
        {
            ++pos;
        }
        return bytes.substr(start, pos - start);
    };
    if (next_token() != "P6")
    {
        throw fail("not a binary PPM (P6) file");
    }
    int values[3];
    for (int& v : values)
    {
        const auto token = next_token();
        try
        {
            std::size_t used = 0;
            v = std::stoi(token, &used);
            if (used != token.size())
            {
                throw fail("malformed PPM header");
            }
        } catch (const std::logic_error&)
        {
            throw fail("malformed PPM header");
        }
    }
    if (values[0] <= 0 || values[1] <= 0 || values[2] != 255)
    {
        throw fail("unsupported PPM dimensions or maxval (need maxval 255)");
    }
    ++pos; // the single whitespace byte that ends the header
    Image image(values[0], values[1]);
    if (bytes.size() < pos + image.data.size())
    {
        throw fail("truncated PPM pixel data");
    }
    std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(pos), image.data.size(), image.data.begin());
    return image;
}

inline Image read_ppm(const std::filesystem::path& path)
{
    std::ifstream file(path, std::ios::binary);
    if (!file)
    {
        throw IoError("cannot open \"" + path.string() + "\"");
    }
    const std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    return decode_ppm(bytes, path.string());
}

} // namespace render
} // namespace flt

#endif /* FLT_RENDER_IMAGE_HPP */
