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

#ifndef MMW_CORE_HPP
#define MMW_CORE_HPP

#include <Eigen/Dense>

#include <numbers>
#include <stdexcept>
#include <string>

namespace mmw
{
    template <typename Scalar>
    using Vec2T = Eigen::Matrix<Scalar, 2, 1>;
    template <typename Scalar>
    using Vec3T = Eigen::Matrix<Scalar, 3, 1>;

    using Vec2 = Vec2T<double>;
    using Vec3 = Vec3T<double>;

    inline constexpr double pi = std::numbers::pi;
    inline constexpr double speed_of_light = 299792458.0; // m/s
    inline constexpr double boltzmann = 1.380649e-23;     // J/K

    inline constexpr double deg(double degrees) { return degrees * pi / 180.0; }
    inline constexpr double to_degrees(double radians) { return radians * 180.0 / pi; }

    // Error categories map one-to-one onto CLI exit codes.
    enum class ErrorKind
    {
        invalid_argument,
        config,
        io,
        format,
        convergence,
        numeric
    };

    class Error : public std::runtime_error
    {
    public:
        Error(ErrorKind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}
        ErrorKind kind() const noexcept { return kind_; }

    private:
        ErrorKind kind_;
    };

    [[noreturn]] inline void fail(ErrorKind kind, const std::string &what) { throw Error(kind, what); }

    // 2D cross product (z component of the 3D cross product).
    template <typename Scalar>
    inline Scalar cross2(const Vec2T<Scalar> &a, const Vec2T<Scalar> &b)
    {
        return a.x() * b.y() - a.y() * b.x();
    }
} // namespace mmw

#endif
