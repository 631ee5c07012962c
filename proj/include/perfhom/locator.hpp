/// @file locator.hpp
/// @brief Bucket-grid point location in triangle meshes.

#pragma once

#include "perfhom/mesh.hpp"

#include <array>
#include <optional>
#include <vector>

namespace perfhom {

struct Location {
    int triangle = -1;
    std::array<double, 3> bary{};
};

class PointLocator {
public:
    explicit PointLocator(const TriMesh& mesh);

    /// Containing triangle (barycentric tolerance 1e-10), or nothing outside the mesh.
    std::optional<Location> locate(const Vec2& p) const;
    /// Containing triangle, or the candidate closest to containing p, with
    /// barycentric coordinates clamped onto that triangle.
    Location locate_nearest(const Vec2& p) const;

private:
    std::array<double, 3> barycentric(int t, const Vec2& p) const;
    int bucket_index(int i, int j) const { return j * cells_ + i; }
    std::array<int, 2> bucket_of(const Vec2& p) const;

    const TriMesh* mesh_;
    Vec2 lo_;
    Vec2 size_;
    int cells_ = 1;
    std::vector<std::vector<int>> buckets_;
};

}  // namespace perfhom
