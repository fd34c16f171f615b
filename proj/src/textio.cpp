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

#include "mmw/textio.hpp"
#include "mmw/core.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fcntl.h>
#include <unistd.h>

namespace mmw::text
{
    std::string_view strip_comment(std::string_view line, char marker)
    {
        const auto p = line.find(marker);
        return p == std::string_view::npos ? line : line.substr(0, p);
    }

    std::string_view trim(std::string_view s)
    {
        constexpr std::string_view ws = " \t\r\n\f\v";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string_view::npos)
            return {};
        return s.substr(b, s.find_last_not_of(ws) - b + 1);
    }

    std::vector<std::string_view> split_ws(std::string_view s)
    {
        std::vector<std::string_view> out;
        constexpr std::string_view ws = " \t\r\n\f\v";
        std::size_t i = s.find_first_not_of(ws);
        while (i != std::string_view::npos)
        {
            const std::size_t j = s.find_first_of(ws, i);
            out.push_back(s.substr(i, j == std::string_view::npos ? std::string_view::npos : j - i));
            i = j == std::string_view::npos ? j : s.find_first_not_of(ws, j);
        }
        return out;
    }

    double parse_double(std::string_view s)
    {
        s = trim(s);
        if (!s.empty() && s.front() == '+')
            s.remove_prefix(1);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            fail(ErrorKind::format, "not a number: '" + std::string(s) + "'");
        return v;
    }

    long parse_int(std::string_view s)
    {
        s = trim(s);
        if (!s.empty() && s.front() == '+')
            s.remove_prefix(1);
        long v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            fail(ErrorKind::format, "not an integer: '" + std::string(s) + "'");
        return v;
    }

    std::uint64_t parse_uint64(std::string_view s)
    {
        s = trim(s);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            fail(ErrorKind::format, "not an unsigned integer: '" + std::string(s) + "'");
        return v;
    }

    std::string format_double(double x)
    {
        std::array<char, 32> buf{};
        const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
        if (ec != std::errc())
            fail(ErrorKind::numeric, "cannot format number");
        return std::string(buf.data(), ptr);
    }

    void write_file_atomic(const std::filesystem::path &path, std::string_view content)
    {
        auto tmp = path;
        tmp += ".tmp." + std::to_string(::getpid());
        const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
        if (fd < 0)
            fail(ErrorKind::io, "cannot create " + tmp.string());
        std::size_t done = 0;
        while (done < content.size())
        {
            const auto n = ::write(fd, content.data() + done, content.size() - done);
            if (n <= 0)
            {
                ::close(fd);
                std::filesystem::remove(tmp);
                fail(ErrorKind::io, "write failed for " + tmp.string());
            }
            done += static_cast<std::size_t>(n);
        }
        if (::fsync(fd) != 0 || ::close(fd) != 0)
        {
            std::filesystem::remove(tmp);
            fail(ErrorKind::io, "fsync failed for " + tmp.string());
        }
        std::error_code ec;
        std::filesystem::rename(tmp, path, ec);
        if (ec)
        {
            std::filesystem::remove(tmp);
            fail(ErrorKind::io, "cannot rename to " + path.string() + ": " + ec.message());
        }
    }

    std::uint64_t fnv1a(std::string_view data, std::uint64_t h)
    {
        for (unsigned char c : data)
        {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return h;
    }

    std::string hex64(std::uint64_t v)
    {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
        return buf;
    }
} // namespace mmw::text
