// SPDX-License-Identifier: Apache-2.0
//
// mmwave-indoor: stochastic indoor environments and rough-surface mmWave propagation
// Copyright (C) 2026 The mmwave-indoor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMW_TEXTIO_HPP
#define MMW_TEXTIO_HPP

// Locale-independent number parsing/formatting and atomic file writes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace mmw::text
{
    std::string_view strip_comment(std::string_view line, char marker = '#');
    std::string_view trim(std::string_view s);
    std::vector<std::string_view> split_ws(std::string_view s);

    // Whole-token parses; throw Error(format) on trailing garbage or overflow.
    double parse_double(std::string_view s);
    long parse_int(std::string_view s);
    std::uint64_t parse_uint64(std::string_view s);

    // Shortest representation that reads back to the same double.
    std::string format_double(double x);

    // Writes to a temporary file in the same directory, flushes it to disk, then renames.
    void write_file_atomic(const std::filesystem::path &path, std::string_view content);

    // 64-bit FNV-1a, printed as 16 hex digits by hex64.
    std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull);
    std::string hex64(std::uint64_t v);
} // namespace mmw::text

#endif
