/// @file quadrature.hpp
/// @brief Fixed low-order quadrature rules shared by assembly and post-processing.

#pragma once

#include <array>
#include <cmath>

namespace perfhom::quad {

/// Degree-2 rule on a triangle, barycentric points with equal weights (times area).
inline constexpr std::array<std::array<double, 3>, 3> kTrianglePoints{{
    {2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
    {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
    {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
}};
inline constexpr double kTriangleWeight = 1.0 / 3.0;

/// Two-point Gauss rule on [0,1] (weights 1/2, times edge length).
inline const std::array<double, 2> kEdgePoints{0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};
inline constexpr double kEdgeWeight = 0.5;

}  // namespace perfhom::quad
