/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/core/random.hpp
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

#ifndef FLT_CORE_RANDOM_HPP
#define FLT_CORE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

namespace flt {

/**
 * splitmix64 generator (Steele, Lea, Flood 2014). The state is the seed itself; each call adds the golden
 * gamma 0x9E3779B97F4A7C15 and returns the mixed state.
 *
 * Used instead of the <random> distributions wherever output must be identical across standard library
 * implementations: synthetic models, synthetic corpora and shuffle plans.
 */
class SplitMix64
{
public:
    explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    std::uint64_t next() noexcept
    {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Integer in [0, bound) by Lemire's multiply-shift: floor(next() * bound / 2^64).
    std::uint64_t below(std::uint64_t bound) noexcept
    {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Standard normal sample (Box-Muller, one value per call).
    double normal() noexcept
    {
        const double u1 = (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; // (0, 1)
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

} // namespace flt

#endif /* FLT_CORE_RANDOM_HPP */
