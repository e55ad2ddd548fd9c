/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/eval/shuffle.hpp
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

#ifndef FLT_EVAL_SHUFFLE_HPP
#define FLT_EVAL_SHUFFLE_HPP

#include "flt/core/error.hpp"
#include "flt/core/io.hpp"
#include "flt/core/random.hpp"

#include "nlohmann/json.hpp"

#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

namespace flt {
namespace eval {

/// Pairs driving video i with the reference image of video assignment[i].
struct ShufflePlan
{
    std::vector<std::string> video_ids;
    std::vector<int> assignment;
    std::uint64_t seed = 0;

    friend bool operator==(const ShufflePlan&, const ShufflePlan&) = default;
};

/// Throws ValidationError unless assignment is a permutation of 0..n-1 matching video_ids.
inline void validate(const ShufflePlan& plan)
{
    const auto n = plan.video_ids.size();
    if (plan.assignment.size() != n)
    {
        throw ValidationError("assignment", "assignment length does not match the number of videos");
    }
    std::vector<bool> seen(n, false);
    for (int target : plan.assignment)
    {
        if (target < 0 || static_cast<std::size_t>(target) >= n || seen[target])
        {
            throw ValidationError("assignment", "assignment is not a bijection");
        }
        seen[target] = true;
    }
}

/**
 * Seeded shuffle of the pairing. The generator is splitmix64 seeded with \p seed; the permutation starts as
 * the identity and, for i = n-1 down to 1, swaps entry i with entry j = below(i + 1), where below(b) is
 * floor(next() * b / 2^64). Any implementation following these steps reproduces the same plan.
 *
 * @throws ArgumentError If \p video_ids is empty.
 */
inline ShufflePlan shuffle_pairs(std::vector<std::string> video_ids, std::uint64_t seed)
{
    if (video_ids.empty())
    {
        throw ArgumentError("shuffle_pairs: no videos");
    }
    ShufflePlan plan;
    plan.seed = seed;
    plan.assignment.resize(video_ids.size());
    std::iota(plan.assignment.begin(), plan.assignment.end(), 0);
    SplitMix64 rng(seed);
    for (std::size_t i = plan.assignment.size() - 1; i > 0; --i)
    {
        const auto j = static_cast<std::size_t>(rng.below(i + 1));
        std::swap(plan.assignment[i], plan.assignment[j]);
    }
    plan.video_ids = std::move(video_ids);
    return plan;
}

/// The matched pairing (every video with its own reference).
inline ShufflePlan identity_plan(std::vector<std::string> video_ids)
{
    ShufflePlan plan;
    plan.assignment.resize(video_ids.size());
    std::iota(plan.assignment.begin(), plan.assignment.end(), 0);
    plan.video_ids = std::move(video_ids);
    return plan;
}

inline nlohmann::json to_json(const ShufflePlan& plan)
{
    return {{"seed", plan.seed}, {"video_ids", plan.video_ids}, {"assignment", plan.assignment}};
}

inline ShufflePlan plan_from_json(const nlohmann::json& j)
{
    ShufflePlan plan;
    try
    {
        plan.video_ids = j.at("video_ids").get<std::vector<std::string>>();
        plan.assignment = j.at("assignment").get<std::vector<int>>();
        plan.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception& e)
    {
        throw ValidationError("plan", std::string("malformed shuffle plan: ") + e.what());
    }
    validate(plan);
    return plan;
}

inline ShufflePlan read_plan(const std::filesystem::path& path)
{
    return plan_from_json(io::read_json_file(path));
}

inline void write_plan(const std::filesystem::path& path, const ShufflePlan& plan)
{
    io::write_json_file(path, to_json(plan));
}

/// Reads video ids from a JSON array of strings, or from a text file with one id per line.
inline std::vector<std::string> read_video_ids(const std::filesystem::path& path)
{
    const auto text = io::read_text_file(path);
    std::vector<std::string> ids;
    const auto parsed = nlohmann::json::parse(text, nullptr, false);
    if (!parsed.is_discarded())
    {
        if (!parsed.is_array())
        {
            throw InputError(path.string() + ": expected a JSON array of video ids");
        }
        for (const auto& id : parsed)
        {
            if (!id.is_string())
            {
                throw InputError(path.string() + ": video ids must be strings");
            }
            ids.push_back(id.get<std::string>());
        }
        return ids;
    }
    std::size_t start = 0;
    while (start <= text.size())
    {
        auto end = text.find('\n', start);
        if (end == std::string::npos)
        {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t'))
        {
            line.pop_back();
        }
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string::npos)
        {
            ids.push_back(line.substr(first));
        }
        start = end + 1;
    }
    return ids;
}

} // namespace eval
} // namespace flt

#endif /* FLT_EVAL_SHUFFLE_HPP */
