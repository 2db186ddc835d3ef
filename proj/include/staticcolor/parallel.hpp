/*
 * Copyright 2026 The staticcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "staticcolor/header.hpp"

namespace staticcolor {

/// Worker count from STATICCOLOR_WORKERS, else the hardware concurrency.
inline std::size_t default_workers() {
  if (const char* env = std::getenv("STATICCOLOR_WORKERS")) {
    if (auto n = parse_integer<std::size_t>(env); n && *n > 0) return *n;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Splits [0, rows) into contiguous blocks and runs fn(block, first, last)
/// on up to `workers` threads. Exceptions from workers are rethrown.
template <typename Fn>
void for_each_row_block(std::size_t rows, std::size_t workers, Fn&& fn) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(rows, 1));
  if (workers == 1) {
    fn(std::size_t{0}, std::size_t{0}, rows);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t chunk = (rows + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t first = w * chunk;
    const std::size_t last = std::min(rows, first + chunk);
    if (first >= last) break;
    threads.emplace_back([&, w, first, last] {
      try {
        fn(w, first, last);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace staticcolor
