#include "perfhom/mesh.hpp"

#include "perfhom/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace perfhom {

namespace {

enum class Side : signed char { Inside = -1, On = 0, Outside = 1 };

// Nodes this close to the circle (in units of h) may be projected to repair slivers.
constexpr double kForcedSnapReach = 0.75;

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

double cross(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

// Intersection of segment [from, to] with the circle, `from` outside and `to` inside.
Vec2 segment_circle_cut(const Vec2& from, const Vec2& to, const Vec2& center, double r) {
    const Vec2 d = to - from;
    const Vec2 f = from - center;
    const double a = d.squaredNorm();
    const double b = 2.0 * f.dot(d);
    const double c = f.squaredNorm() - r * r;
    const double disc = std::max(b * b - 4.0 * a * c, 0.0);
    // Smaller root: first crossing when walking from the outside point.
    const double q = -0.5 * (b - std::sqrt(disc));
    double t = c / q;
    t = std::clamp(t, 0.0, 1.0);
    const Vec2 p = from + t * d;
    return center + r * (p - center) / (p - center).norm();
}

double mesh_min_angle(const std::vector<Vec2>& v, const std::vector<Triangle>& tris) {
    double worst = 180.0;
    for (const auto& t : tris) worst = std::min(worst, min_angle_deg(v[t[0]], v[t[1]], v[t[2]]));
    return worst;
}

struct BoundaryEdges {
    std::vector<Edge> edges;
    std::vector<int> interior_overuse;  // edges shared by more than two triangles
};

BoundaryEdges boundary_edges(const std::vector<Triangle>& tris) {
    std::unordered_map<std::uint64_t, int> count;
    count.reserve(tris.size() * 2);
    for (const auto& t : tris)
        for (int k = 0; k < 3; ++k) ++count[edge_key(t[k], t[(k + 1) % 3])];
    BoundaryEdges out;
    for (const auto& t : tris) {
        for (int k = 0; k < 3; ++k) {
            const int a = t[k], b = t[(k + 1) % 3];
            const int c = count[edge_key(a, b)];
            if (c == 1) out.edges.push_back({a, b});
            if (c > 2) out.interior_overuse.push_back(a);
        }
    }
    return out;
}

// Orders SIGMA edges head-to-tail; returns the number of closed loops found.
int chain_loops(std::vector<Edge>& edges) {
    if (edges.empty()) return 0;
    std::unordered_map<int, int> by_start;
    for (std::size_t e = 0; e < edges.size(); ++e) by_start[edges[e][0]] = static_cast<int>(e);
    std::vector<bool> used(edges.size(), false);
    std::vector<Edge> ordered;
    ordered.reserve(edges.size());
    int loops = 0;
    for (std::size_t seed = 0; seed < edges.size(); ++seed) {
        if (used[seed]) continue;
        ++loops;
        auto e = static_cast<int>(seed);
        while (!used[e]) {
            used[e] = true;
            ordered.push_back(edges[e]);
            const auto it = by_start.find(edges[e][1]);
            if (it == by_start.end()) return -1;  // open chain
            e = it->second;
        }
    }
    edges = std::move(ordered);
    return loops;
}

double compute_h_max(const std::vector<Vec2>& v, const std::vector<Triangle>& tris) {
    double hm = 0.0;
    for (const auto& t : tris)
        for (int k = 0; k < 3; ++k) hm = std::max(hm, (v[t[k]] - v[t[(k + 1) % 3]]).norm());
    return hm;
}

struct Carved {
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
    std::vector<bool> on_circle;
};

// Projects grid nodes within the snap band (or flagged in `forced`) onto the circle,
// cuts triangles crossing it at exact intersections and drops the covered part.
Carved carve_hole(const std::vector<Vec2>& grid, const std::vector<Triangle>& grid_tris, const CellGeometry& geom,
                  const SnapParameters& snap, const std::vector<bool>& forced) {
    const Vec2 c = geom.hole_center;
    const double r = geom.hole_radius;
    const double h = geom.grid_step();
    Carved out;
    auto& v = out.vertices;
    v = grid;
    out.on_circle.assign(v.size(), false);
    std::vector<Side> side(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double dist = (v[k] - c).norm() - r;
        if ((dist > -snap.inside * h && dist < snap.outside * h) || forced[k]) {
            v[k] = c + r * (v[k] - c) / (v[k] - c).norm();
            side[k] = Side::On;
            out.on_circle[k] = true;
        } else {
            side[k] = dist < 0.0 ? Side::Inside : Side::Outside;
        }
    }

    std::unordered_map<std::uint64_t, int> cuts;
    const auto cut = [&](int outside, int inside) {
        const auto key = edge_key(outside, inside);
        if (auto it = cuts.find(key); it != cuts.end()) return it->second;
        v.push_back(segment_circle_cut(v[outside], v[inside], c, r));
        out.on_circle.push_back(true);
        const int id = static_cast<int>(v.size()) - 1;
        cuts.emplace(key, id);
        return id;
    };
    const auto worst_angle = [&](std::initializer_list<Triangle> ts) {
        double w = 180.0;
        for (const auto& t : ts) w = std::min(w, min_angle_deg(v[t[0]], v[t[1]], v[t[2]]));
        return w;
    };

    auto& tris = out.triangles;
    for (const auto& t : grid_tris) {
        const std::array<Side, 3> s{side[t[0]], side[t[1]], side[t[2]]};
        const bool any_in = std::ranges::find(s, Side::Inside) != s.end();
        const bool any_out = std::ranges::find(s, Side::Outside) != s.end();
        if (!any_in) {
            // All-on-circle triangles are chords of the disk and lie inside the hole.
            if (any_out) tris.push_back(t);
            continue;
        }
        if (!any_out) continue;
        for (int rot = 0; rot < 3; ++rot) {
            const int a = t[rot], b = t[(rot + 1) % 3], d = t[(rot + 2) % 3];
            const Side sa = side[a], sb = side[b], sd = side[d];
            if (sa != Side::Outside) continue;
            if (sb == Side::Inside && sd == Side::Inside) {
                tris.push_back({a, cut(a, b), cut(a, d)});
            } else if (sb == Side::Outside && sd == Side::Inside) {
                const int p = cut(b, d), q = cut(a, d);
                const Triangle t1{a, b, p}, t2{a, p, q}, u1{a, b, q}, u2{b, p, q};
                if (worst_angle({t1, t2}) >= worst_angle({u1, u2})) {
                    tris.push_back(t1);
                    tris.push_back(t2);
                } else {
                    tris.push_back(u1);
                    tris.push_back(u2);
                }
            } else if (sb == Side::Inside && sd == Side::On) {
                tris.push_back({a, cut(a, b), d});
            } else if (sb == Side::On && sd == Side::Inside) {
                tris.push_back({a, b, cut(a, d)});
            } else {
                continue;
            }
            break;
        }
    }
    return out;
}
}  // namespace

// ---------------------------------------------------------------------------

double CellGeometry::grid_step() const { return std::ldexp(1.0, -refinement); }

void CellGeometry::validate() const {
    if (refinement < 2 || refinement > 12)
        throw Error(ErrorKind::InvalidGeometry, "refinement level must lie in [2, 12]");
    if (!(hole_radius >= 0.0) || hole_radius > 0.4)
        throw Error(ErrorKind::InvalidGeometry, "hole radius must lie in [0, 0.4]");
    if (hole_radius == 0.0) return;
    const double h = grid_step();
    if (hole_radius < 2.0 * h)
        throw Error(ErrorKind::InvalidGeometry, "hole radius below two grid steps cannot be resolved");
    const double reach = hole_radius + 2.0 * h;
    for (int k = 0; k < 2; ++k) {
        const double c = hole_center[k];
        if (!(c - reach > 0.0 && c + reach < 1.0))
            throw Error(ErrorKind::InvalidGeometry, "hole must stay inside the cell with a 2h margin");
    }
}

const char* tag_name(EdgeTag tag) {
    switch (tag) {
    case EdgeTag::Sigma: return "SIGMA";
    case EdgeTag::Gamma: return "GAMMA";
    case EdgeTag::CellFaceLeft: return "CELL_FACE_L";
    case EdgeTag::CellFaceRight: return "CELL_FACE_R";
    case EdgeTag::CellFaceBottom: return "CELL_FACE_B";
    case EdgeTag::CellFaceTop: return "CELL_FACE_T";
    }
    return "?";
}

bool TriMesh::has_tag(EdgeTag tag) const {
    const auto it = edge_groups.find(tag);
    return it != edge_groups.end() && !it->second.empty();
}

const std::vector<Edge>& TriMesh::edges(EdgeTag tag) const {
    const auto it = edge_groups.find(tag);
    if (it == edge_groups.end() || it->second.empty())
        throw Error(ErrorKind::MissingTag, std::string("mesh has no ") + tag_name(tag) + " edges");
    return it->second;
}

Vec2 TriMesh::micro(int t, const Vec2& x) const {
    if (triangle_tile.empty()) return x;
    const auto& k = triangle_tile[static_cast<std::size_t>(t)];
    return {tiles * x.x() - k[0], tiles * x.y() - k[1]};
}

Vec2 TriMesh::micro_on_edge(const Vec2& x) const {
    if (tiles == 1) return x;
    Vec2 y;
    for (int d = 0; d < 2; ++d) {
        const double s = tiles * x[d];
        const double k = std::clamp(std::floor(s), 0.0, static_cast<double>(tiles - 1));
        y[d] = s - k;
    }
    return y;
}

std::uint64_t TriMesh::fingerprint() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ull;
        }
    };
    for (const auto& v : vertices) mix(v.data(), 2 * sizeof(double));
    for (const auto& t : triangles) mix(t.data(), 3 * sizeof(int));
    mix(&tiles, sizeof(tiles));
    return h;
}

double triangle_area(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    return signed_area(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]]);
}

double min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c) {
    const std::array<Vec2, 3> p{a, b, c};
    double worst = 180.0;
    for (int k = 0; k < 3; ++k) {
        const Vec2 u = p[(k + 1) % 3] - p[k];
        const Vec2 w = p[(k + 2) % 3] - p[k];
        const double ang = std::atan2(std::abs(cross(u, w)), u.dot(w));
        worst = std::min(worst, ang * 180.0 / std::numbers::pi);
    }
    return worst;
}

// ---------------------------------------------------------------------------

TriMesh build_cell_mesh(const CellGeometry& geom, const SnapParameters& snap) {
    geom.validate();
    const int n = 1 << geom.refinement;
    const double h = geom.grid_step();
    const auto node = [n](int i, int j) { return j * (n + 1) + i; };

    std::vector<Vec2> grid;
    grid.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) grid.emplace_back(i * h, j * h);

    std::vector<Triangle> grid_tris;
    grid_tris.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int a = node(i, j), b = node(i + 1, j), c = node(i + 1, j + 1), d = node(i, j + 1);
            if ((2 * i < n) == (2 * j < n)) {
                grid_tris.push_back({a, b, c});
                grid_tris.push_back({a, c, d});
            } else {
                grid_tris.push_back({a, b, d});
                grid_tris.push_back({b, c, d});
            }
        }
    }

    std::vector<Vec2> v;
    std::vector<Triangle> tris;
    std::vector<bool> on_circle;
    if (!geom.has_hole()) {
        v = std::move(grid);
        tris = std::move(grid_tris);
        on_circle.assign(v.size(), false);
    } else {
        // Grid nodes next to a sliver get projected as well; a few rounds settle it.
        std::vector<bool> forced(grid.size(), false);
        for (int round = 0; round < 4; ++round) {
            auto carved = carve_hole(grid, grid_tris, geom, snap, forced);
            v = std::move(carved.vertices);
            tris = std::move(carved.triangles);
            on_circle = std::move(carved.on_circle);
            bool changed = false;
            for (const auto& t : tris) {
                if (min_angle_deg(v[t[0]], v[t[1]], v[t[2]]) >= snap.min_angle_deg) continue;
                for (int k : t) {
                    if (static_cast<std::size_t>(k) >= grid.size() || on_circle[k] || forced[k]) continue;
                    const double dist = std::abs((grid[k] - geom.hole_center).norm() - geom.hole_radius);
                    if (dist < kForcedSnapReach * h) forced[k] = changed = true;
                }
            }
            if (!changed) break;
        }
    }

    // Drop unreferenced vertices, keeping the original order.
    std::vector<int> remap(v.size(), -1);
    for (const auto& t : tris)
        for (int k : t) remap[k] = 0;
    TriMesh mesh;
    mesh.geometry = geom;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (remap[k] < 0) continue;
        remap[k] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(v[k]);
    }
    for (auto& t : tris)
        for (int& k : t) k = remap[k];
    mesh.triangles = std::move(tris);

    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        if (!(triangle_area(mesh, static_cast<int>(t)) > 0.0))
            throw Error(ErrorKind::MeshQuality, "non-positive triangle area after hole carving");
    }
    const double worst = mesh_min_angle(mesh.vertices, mesh.triangles);
    if (worst < snap.min_angle_deg) {
        std::ostringstream msg;
        msg << "minimum angle " << worst << " deg below " << snap.min_angle_deg;
        throw Error(ErrorKind::MeshQuality, msg.str());
    }

    auto bnd = boundary_edges(mesh.triangles);
    if (!bnd.interior_overuse.empty()) throw Error(ErrorKind::MeshQuality, "non-manifold edge in cell mesh");
    auto& groups = mesh.edge_groups;
    for (EdgeTag tag : {EdgeTag::Sigma, EdgeTag::CellFaceLeft, EdgeTag::CellFaceRight, EdgeTag::CellFaceBottom,
                        EdgeTag::CellFaceTop})
        groups[tag];
    for (const auto& e : bnd.edges) {
        const Vec2& p = mesh.vertices[e[0]];
        const Vec2& q = mesh.vertices[e[1]];
        if (p.x() == 0.0 && q.x() == 0.0) groups[EdgeTag::CellFaceLeft].push_back(e);
        else if (p.x() == 1.0 && q.x() == 1.0) groups[EdgeTag::CellFaceRight].push_back(e);
        else if (p.y() == 0.0 && q.y() == 0.0) groups[EdgeTag::CellFaceBottom].push_back(e);
        else if (p.y() == 1.0 && q.y() == 1.0) groups[EdgeTag::CellFaceTop].push_back(e);
        else groups[EdgeTag::Sigma].push_back(e);
    }
    const int loops = chain_loops(groups[EdgeTag::Sigma]);
    if (geom.has_hole() ? loops != 1 : loops != 0)
        throw Error(ErrorKind::MeshQuality, "hole boundary is not a single closed loop");

    // Face nodes are untouched grid nodes, so remap gives their indices directly.
    for (int j = 0; j <= n; ++j) mesh.periodic_pairs.emplace_back(remap[node(0, j)], remap[node(n, j)]);
    for (int i = 0; i < n; ++i) mesh.periodic_pairs.emplace_back(remap[node(i, 0)], remap[node(i, n)]);

    mesh.h_max = compute_h_max(mesh.vertices, mesh.triangles);
    return mesh;
}

TriMesh tile_perforated_mesh(const TriMesh& cell, int n) {
    if (n < 1) throw Error(ErrorKind::InvalidGeometry, "tile count must be positive");
    TriMesh out;
    out.geometry = cell.geometry;
    out.tiles = n;
    const double scale = 1.0 / n;
    const auto on_face = [](const Vec2& y) { return y.x() == 0.0 || y.x() == 1.0 || y.y() == 0.0 || y.y() == 1.0; };

    std::map<std::pair<double, double>, int> face_nodes;
    out.vertices.reserve(cell.vertices.size() * static_cast<std::size_t>(n * n));
    out.triangles.reserve(cell.triangles.size() * static_cast<std::size_t>(n * n));
    std::vector<int> local(cell.vertices.size());
    const bool has_sigma = cell.has_tag(EdgeTag::Sigma);
    auto& sigma = out.edge_groups[EdgeTag::Sigma];

    for (int k2 = 0; k2 < n; ++k2) {
        for (int k1 = 0; k1 < n; ++k1) {
            for (std::size_t i = 0; i < cell.vertices.size(); ++i) {
                const Vec2& y = cell.vertices[i];
                // Numerators k + y are exact for dyadic face coordinates.
                const double nx = k1 + y.x(), ny = k2 + y.y();
                if (on_face(y)) {
                    const auto [it, inserted] =
                        face_nodes.try_emplace({nx, ny}, static_cast<int>(out.vertices.size()));
                    if (inserted) out.vertices.emplace_back(nx * scale, ny * scale);
                    local[i] = it->second;
                } else {
                    local[i] = static_cast<int>(out.vertices.size());
                    out.vertices.emplace_back(nx * scale, ny * scale);
                }
            }
            for (std::size_t t = 0; t < cell.triangles.size(); ++t) {
                const auto& tri = cell.triangles[t];
                out.triangles.push_back({local[tri[0]], local[tri[1]], local[tri[2]]});
                out.triangle_tile.push_back({k1, k2});
                out.cell_triangle.push_back(static_cast<int>(t));
            }
            if (has_sigma)
                for (const auto& e : cell.edges(EdgeTag::Sigma)) sigma.push_back({local[e[0]], local[e[1]]});
        }
    }

    const auto bnd = boundary_edges(out.triangles);
    if (!bnd.interior_overuse.empty()) throw Error(ErrorKind::StitchFailure, "edge shared by more than two triangles");
    auto& gamma = out.edge_groups[EdgeTag::Gamma];
    std::size_t hole_edges = 0;
    for (const auto& e : bnd.edges) {
        const Vec2& p = out.vertices[e[0]];
        const Vec2& q = out.vertices[e[1]];
        const bool outer = (p.x() == 0.0 && q.x() == 0.0) || (p.x() == 1.0 && q.x() == 1.0) ||
                           (p.y() == 0.0 && q.y() == 0.0) || (p.y() == 1.0 && q.y() == 1.0);
        if (outer) gamma.push_back(e);
        else ++hole_edges;
    }
    if (hole_edges != sigma.size())
        throw Error(ErrorKind::StitchFailure, "face nodes failed to pair up across neighbouring tiles");
    out.h_max = compute_h_max(out.vertices, out.triangles);
    return out;
}

QualityReport mesh_quality_report(const TriMesh& mesh) {
    QualityReport q;
    q.vertex_count = static_cast<int>(mesh.vertices.size());
    q.triangle_count = static_cast<int>(mesh.triangles.size());
    q.min_angle_deg = mesh.triangles.empty() ? 0.0 : mesh_min_angle(mesh.vertices, mesh.triangles);
    q.h_max = compute_h_max(mesh.vertices, mesh.triangles);
    q.min_signed_area = std::numeric_limits<double>::infinity();
    std::unordered_map<std::uint64_t, int> edges;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double a = triangle_area(mesh, static_cast<int>(t));
        q.area += a;
        q.min_signed_area = std::min(q.min_signed_area, a);
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) ++edges[edge_key(tri[k], tri[(k + 1) % 3])];
    }
    q.edge_count = static_cast<int>(edges.size());
    q.euler_characteristic = q.vertex_count - q.edge_count + q.triangle_count;
    return q;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<EdgeTag, 6> kAllTags{EdgeTag::Sigma,         EdgeTag::Gamma,         EdgeTag::CellFaceLeft,
                                          EdgeTag::CellFaceRight, EdgeTag::CellFaceBottom, EdgeTag::CellFaceTop};

}  // namespace

void write_mesh_text(const TriMesh& mesh, std::ostream& out) {
    const auto old_precision = out.precision(17);
    out << "tri-mesh v1 " << mesh.vertices.size() << ' ' << mesh.triangles.size() << '\n';
    for (const auto& p : mesh.vertices) out << p.x() << ' ' << p.y() << '\n';
    for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (EdgeTag tag : kAllTags) {
        const auto it = mesh.edge_groups.find(tag);
        if (it == mesh.edge_groups.end()) continue;
        out << tag_name(tag) << ' ' << it->second.size() << '\n';
        for (const auto& e : it->second) out << e[0] << ' ' << e[1] << '\n';
    }
    if (!mesh.periodic_pairs.empty()) {
        out << "PERIODIC " << mesh.periodic_pairs.size() << '\n';
        for (const auto& [m, s] : mesh.periodic_pairs) out << m << ' ' << s << '\n';
    }
    out.precision(old_precision);
}

TriMesh read_mesh_text(std::istream& in) {
    std::string magic, version;
    std::size_t nv = 0, nt = 0;
    if (!(in >> magic >> version >> nv >> nt) || magic != "tri-mesh" || version != "v1")
        throw Error(ErrorKind::InvalidConfig, "not a tri-mesh v1 file");
    TriMesh mesh;
    mesh.vertices.resize(nv);
    for (auto& p : mesh.vertices) in >> p.x() >> p.y();
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
    std::string name;
    std::size_t count = 0;
    while (in >> name >> count) {
        if (name == "PERIODIC") {
            mesh.periodic_pairs.resize(count);
            for (auto& [m, s] : mesh.periodic_pairs) in >> m >> s;
            continue;
        }
        const auto tag = std::ranges::find_if(kAllTags, [&](EdgeTag t) { return name == tag_name(t); });
        if (tag == kAllTags.end()) throw Error(ErrorKind::InvalidConfig, "unknown edge tag " + name);
        auto& group = mesh.edge_groups[*tag];
        group.resize(count);
        for (auto& e : group) in >> e[0] >> e[1];
    }
    if (in.bad()) throw Error(ErrorKind::InvalidConfig, "truncated tri-mesh file");
    mesh.h_max = compute_h_max(mesh.vertices, mesh.triangles);
    return mesh;
}

void write_vtk(const TriMesh& mesh, std::ostream& out, std::span<const double> point_values,
               const char* field_name) {
    const auto old_precision = out.precision(17);
    out << "# vtk DataFile Version 3.0\nperfhom mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertices.size() << " double\n";
    for (const auto& p : mesh.vertices) out << p.x() << ' ' << p.y() << " 0\n";
    out << "CELLS " << mesh.triangles.size() << ' ' << 4 * mesh.triangles.size() << '\n';
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << mesh.triangles.size() << '\n';
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) out << "5\n";
    if (point_values.size() == mesh.vertices.size()) {
        out << "POINT_DATA " << point_values.size() << "\nSCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
        for (double x : point_values) out << x << '\n';
    }
    out.precision(old_precision);
}

}  // namespace perfhom
