#include "perfhom/locator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace perfhom {

namespace {
constexpr double kInsideTol = 1e-10;
}

PointLocator::PointLocator(const TriMesh& mesh) : mesh_(&mesh) {
    Vec2 lo = Vec2::Constant(std::numeric_limits<double>::infinity());
    Vec2 hi = -lo;
    for (const auto& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    lo_ = lo;
    size_ = (hi - lo).cwiseMax(Vec2::Constant(1e-300));
    cells_ = std::max(1, static_cast<int>(std::sqrt(mesh.triangles.size() / 2.0)));
    buckets_.assign(static_cast<std::size_t>(cells_ * cells_), {});
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        Vec2 tlo = mesh.vertices[mesh.triangles[t][0]];
        Vec2 thi = tlo;
        for (int v : mesh.triangles[t]) {
            tlo = tlo.cwiseMin(mesh.vertices[v]);
            thi = thi.cwiseMax(mesh.vertices[v]);
        }
        const auto a = bucket_of(tlo);
        const auto b = bucket_of(thi);
        for (int j = a[1]; j <= b[1]; ++j)
            for (int i = a[0]; i <= b[0]; ++i) buckets_[static_cast<std::size_t>(bucket_index(i, j))].push_back(t);
    }
}

std::array<int, 2> PointLocator::bucket_of(const Vec2& p) const {
    std::array<int, 2> ij{};
    for (int d = 0; d < 2; ++d) {
        const double s = (p[d] - lo_[d]) / size_[d] * cells_;
        ij[static_cast<std::size_t>(d)] = std::clamp(static_cast<int>(std::floor(s)), 0, cells_ - 1);
    }
    return ij;
}

std::array<double, 3> PointLocator::barycentric(int t, const Vec2& p) const {
    const auto& tri = mesh_->triangles[static_cast<std::size_t>(t)];
    const Vec2& a = mesh_->vertices[tri[0]];
    const Vec2& b = mesh_->vertices[tri[1]];
    const Vec2& c = mesh_->vertices[tri[2]];
    const Vec2 u = b - a, v = c - a, w = p - a;
    const double det = u.x() * v.y() - u.y() * v.x();
    const double l1 = (w.x() * v.y() - w.y() * v.x()) / det;
    const double l2 = (u.x() * w.y() - u.y() * w.x()) / det;
    return {1.0 - l1 - l2, l1, l2};
}

std::optional<Location> PointLocator::locate(const Vec2& p) const {
    const auto ij = bucket_of(p);
    for (int t : buckets_[static_cast<std::size_t>(bucket_index(ij[0], ij[1]))]) {
        const auto b = barycentric(t, p);
        if (std::min({b[0], b[1], b[2]}) >= -kInsideTol) return Location{t, b};
    }
    return std::nullopt;
}

Location PointLocator::locate_nearest(const Vec2& p) const {
    if (auto hit = locate(p)) return *hit;
    const auto ij = bucket_of(p);
    Location best;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int ring = 0; ring <= cells_ && best.triangle < 0; ++ring) {
        for (int j = std::max(0, ij[1] - ring); j <= std::min(cells_ - 1, ij[1] + ring); ++j) {
            for (int i = std::max(0, ij[0] - ring); i <= std::min(cells_ - 1, ij[0] + ring); ++i) {
                for (int t : buckets_[static_cast<std::size_t>(bucket_index(i, j))]) {
                    const auto b = barycentric(t, p);
                    const double score = std::min({b[0], b[1], b[2]});
                    if (score > best_score) {
                        best_score = score;
                        best = {t, b};
                    }
                }
            }
        }
    }
    // Clamp onto the triangle so that interpolation never extrapolates.
    double sum = 0.0;
    for (double& b : best.bary) sum += (b = std::max(b, 0.0));
    for (double& b : best.bary) b /= sum;
    return best;
}

}  // namespace perfhom
