/*
 * flt - Facial landmark transformation with a linear 3D morphable model.
 *
 * File: include/flt/pipeline/parallel.hpp
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

#ifndef FLT_PIPELINE_PARALLEL_HPP
#define FLT_PIPELINE_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace flt {
namespace pipeline {

/// Number of worker threads to use when the caller asks for 0 ("automatic").
inline unsigned resolve_thread_count(unsigned requested, std::size_t n_tasks)
{
    unsigned threads = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n_tasks, 1)));
}

/**
 * Calls task(i) for i in [0, n) on up to \p threads workers (0 = hardware concurrency). Indices are handed
 * out dynamically, so tasks must only write to their own output slot. If tasks throw, the exception of the
 * lowest failing index is rethrown after all workers have finished.
 */
template <typename Task>
void parallel_for(std::size_t n, unsigned threads, Task&& task)
{
    threads = resolve_thread_count(threads, n);
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            task(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned w = 0; w < threads; ++w)
        {
            workers.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                {
                    try
                    {
                        task(i);
                    } catch (...)
                    {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (const auto& error : errors)
    {
        if (error)
        {
            std::rethrow_exception(error);
        }
    }
}

} // namespace pipeline
} // namespace flt

#endif /* FLT_PIPELINE_PARALLEL_HPP */
