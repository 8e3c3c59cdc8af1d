// Copyright 2026 The stab-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stablab {

namespace detail {
inline std::atomic<unsigned> &thread_setting() {
    static std::atomic<unsigned> threads{1};
    return threads;
}
}  // namespace detail

/// Worker count used by parallel_for. 0 means hardware concurrency.
inline void set_threads(unsigned t) {
    if (t == 0) {
        t = std::max(1u, std::thread::hardware_concurrency());
    }
    detail::thread_setting() = t;
}

inline unsigned thread_count() {
    return detail::thread_setting();
}

/// Calls body(i) for i in [begin, end), split into contiguous blocks. body must only
/// write to per-index state; results therefore never depend on the thread count.
template <typename Body>
void parallel_for(size_t begin, size_t end, Body body) {
    size_t count = end > begin ? end - begin : 0;
    unsigned workers = static_cast<unsigned>(std::min<size_t>(thread_count(), count));
    if (workers <= 1) {
        for (size_t i = begin; i < end; i++) {
            body(i);
        }
        return;
    }
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    size_t block = (count + workers - 1) / workers;
    for (unsigned w = 0; w < workers; w++) {
        size_t lo = begin + w * block, hi = std::min(end, lo + block);
        pool.emplace_back([&, lo, hi] {
            try {
                for (size_t i = lo; i < hi; i++) {
                    body(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace stablab
