#include "perfhom/fem.hpp"

#include "perfhom/errors.hpp"
#include "perfhom/quadrature.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>

namespace perfhom {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Vec2 bary_point(const TriMesh& mesh, int t, const std::array<double, 3>& b) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    return b[0] * mesh.vertices[tri[0]] + b[1] * mesh.vertices[tri[1]] + b[2] * mesh.vertices[tri[2]];
}

EvalPoint edge_eval_point(const TriMesh& mesh, const Vec2& x) { return {x, mesh.micro_on_edge(x)}; }

template <class Fn>
void for_each_triangle(const TriMesh& mesh, Fn&& fn) {
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) fn(t);
}

void add_diffusion(const TriMesh& mesh, const Diffusion& term, Triplets& out) {
    for_each_triangle(mesh, [&](int t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = triangle_area(mesh, t);
        const auto g = basis_gradients(mesh, t);
        const Mat2 a = element_matrix_average(mesh, t, term.A);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out.emplace_back(tri[i], tri[j], area * (a * g[j]).dot(g[i]));
    });
}

void add_convection(const TriMesh& mesh, const Convection& term, Triplets& out) {
    // (b . grad phi_j) is constant; int phi_i = area / 3.
    for_each_triangle(mesh, [&](int t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = triangle_area(mesh, t);
        const auto g = basis_gradients(mesh, t);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out.emplace_back(tri[i], tri[j], area / 3.0 * term.b.dot(g[j]));
    });
}

void add_reaction(const TriMesh& mesh, const VolumeReaction& term, Triplets& out) {
    for_each_triangle(mesh, [&](int t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = triangle_area(mesh, t);
        double local[3][3] = {};
        for (const auto& b : quad::kTrianglePoints) {
            const Vec2 x = bary_point(mesh, t, b);
            const double w = quad::kTriangleWeight * area * term.w(eval_point(mesh, t, x));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) local[i][j] += w * b[i] * b[j];
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) out.emplace_back(tri[i], tri[j], local[i][j]);
    });
}

void add_surface(const TriMesh& mesh, const SurfaceReaction& term, Triplets& out) {
    for (const auto& e : mesh.edges(term.tag)) {
        const Vec2& p = mesh.vertices[e[0]];
        const Vec2& q = mesh.vertices[e[1]];
        const double len = (q - p).norm();
        double local[2][2] = {};
        for (double s : quad::kEdgePoints) {
            const double w = quad::kEdgeWeight * len * term.alpha(edge_eval_point(mesh, p + s * (q - p)));
            const double phi[2] = {1.0 - s, s};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) local[i][j] += w * phi[i] * phi[j];
        }
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) out.emplace_back(e[i], e[j], local[i][j]);
    }
}

void add_term(const TriMesh& mesh, const FormDescriptor& term, Triplets& out) {
    std::visit(
        [&](const auto& t) {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, Diffusion>) add_diffusion(mesh, t, out);
            else if constexpr (std::is_same_v<T, Convection>) add_convection(mesh, t, out);
            else if constexpr (std::is_same_v<T, VolumeReaction>) add_reaction(mesh, t, out);
            else add_surface(mesh, t, out);
        },
        term);
}

SparseMatrix from_triplets(int n, const Triplets& trips) {
    SparseMatrix m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

// Union-find root of a node under the periodic master relation.
int periodic_root(const std::vector<int>& master, int v) {
    while (master[static_cast<std::size_t>(v)] != v) v = master[static_cast<std::size_t>(v)];
    return v;
}

}  // namespace

std::array<Vec2, 3> basis_gradients(const TriMesh& mesh, int t) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    const Vec2& a = mesh.vertices[tri[0]];
    const Vec2& b = mesh.vertices[tri[1]];
    const Vec2& c = mesh.vertices[tri[2]];
    const double twice = (b - a).x() * (c - a).y() - (b - a).y() * (c - a).x();
    // grad phi_i is the inward normal of the opposite edge over twice the area.
    auto perp = [twice](const Vec2& u, const Vec2& v) -> Vec2 { return Vec2(u.y() - v.y(), v.x() - u.x()) / twice; };
    return {perp(b, c), perp(c, a), perp(a, b)};
}

EvalPoint eval_point(const TriMesh& mesh, int t, const Vec2& x) { return {x, mesh.micro(t, x)}; }

Mat2 element_matrix_average(const TriMesh& mesh, int t, const MatrixCoefficient& A) {
    Mat2 sum = Mat2::Zero();
    for (const auto& b : quad::kTrianglePoints) {
        const Vec2 x = bary_point(mesh, t, b);
        sum += A(eval_point(mesh, t, x));
    }
    return quad::kTriangleWeight * sum;
}

SparseMatrix assemble_bilinear(const TriMesh& mesh, const FormDescriptor& term) {
    Triplets trips;
    add_term(mesh, term, trips);
    return from_triplets(static_cast<int>(mesh.vertices.size()), trips);
}

SparseMatrix assemble_bilinear(const TriMesh& mesh, const std::vector<FormDescriptor>& terms) {
    Triplets trips;
    for (const auto& term : terms) add_term(mesh, term, trips);
    return from_triplets(static_cast<int>(mesh.vertices.size()), trips);
}

Eigen::VectorXd assemble_load(const TriMesh& mesh, const ScalarCoefficient& f) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
    for_each_triangle(mesh, [&](int t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = triangle_area(mesh, t);
        for (const auto& bc : quad::kTrianglePoints) {
            const double w = quad::kTriangleWeight * area * f(eval_point(mesh, t, bary_point(mesh, t, bc)));
            for (int i = 0; i < 3; ++i) b[tri[i]] += w * bc[i];
        }
    });
    return b;
}

Eigen::VectorXd assemble_load(const TriMesh& mesh, const ScalarCoefficient& g, EdgeTag tag) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
    for (const auto& e : mesh.edges(tag)) {
        const Vec2& p = mesh.vertices[e[0]];
        const Vec2& q = mesh.vertices[e[1]];
        const double len = (q - p).norm();
        for (double s : quad::kEdgePoints) {
            const double w = quad::kEdgeWeight * len * g(edge_eval_point(mesh, p + s * (q - p)));
            b[e[0]] += w * (1.0 - s);
            b[e[1]] += w * s;
        }
    }
    return b;
}

Eigen::VectorXd assemble_flux_load(const TriMesh& mesh, const VectorCoefficient& q) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
    for_each_triangle(mesh, [&](int t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        const double area = triangle_area(mesh, t);
        const auto g = basis_gradients(mesh, t);
        Vec2 qbar = Vec2::Zero();
        for (const auto& bc : quad::kTrianglePoints) qbar += q(eval_point(mesh, t, bary_point(mesh, t, bc)));
        qbar *= quad::kTriangleWeight;
        for (int i = 0; i < 3; ++i) b[tri[i]] += area * qbar.dot(g[i]);
    });
    return b;
}

SparseSystem apply_constraints(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, const TriMesh& mesh,
                               const ConstraintSpec& spec) {
    const int nv = static_cast<int>(mesh.vertices.size());
    if (matrix.rows() != nv || matrix.cols() != nv || rhs.size() != nv)
        throw Error(ErrorKind::MeshMismatch, "system size does not match the mesh");

    std::vector<char> is_dirichlet(static_cast<std::size_t>(nv), 0);
    std::vector<double> values(static_cast<std::size_t>(nv), 0.0);
    if (spec.dirichlet) {
        for (const auto& e : mesh.edges(*spec.dirichlet)) {
            for (int v : e) {
                is_dirichlet[static_cast<std::size_t>(v)] = 1;
                if (spec.dirichlet_value)
                    values[static_cast<std::size_t>(v)] = spec.dirichlet_value({mesh.vertices[v], mesh.vertices[v]});
            }
        }
    }

    std::vector<int> master(static_cast<std::size_t>(nv));
    std::iota(master.begin(), master.end(), 0);
    if (spec.periodic) {
        for (const auto& [m, s] : mesh.periodic_pairs) {
            if (is_dirichlet[static_cast<std::size_t>(s)])
                throw Error(ErrorKind::ConflictingConstraints,
                            "node " + std::to_string(s) + " is both Dirichlet and a periodic slave");
            master[static_cast<std::size_t>(s)] = m;
        }
    }

    SparseSystem sys;
    sys.dof_of_node.assign(static_cast<std::size_t>(nv), -1);
    sys.dirichlet_values = values;
    int next = 0;
    for (int v = 0; v < nv; ++v) {
        if (is_dirichlet[static_cast<std::size_t>(v)] || periodic_root(master, v) != v) continue;
        sys.dof_of_node[static_cast<std::size_t>(v)] = next++;
    }
    for (int v = 0; v < nv; ++v) {
        const int root = periodic_root(master, v);
        if (root != v) {
            if (is_dirichlet[static_cast<std::size_t>(root)])
                throw Error(ErrorKind::ConflictingConstraints, "periodic chain ends in a Dirichlet node");
            sys.dof_of_node[static_cast<std::size_t>(v)] = sys.dof_of_node[static_cast<std::size_t>(root)];
        }
    }
    sys.free_dofs = next;
    sys.has_multiplier = spec.zero_mean;
    const int n = next + (spec.zero_mean ? 1 : 0);

    Triplets trips;
    trips.reserve(static_cast<std::size_t>(matrix.nonZeros()));
    sys.rhs = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < nv; ++i) {
        const int di = sys.dof_of_node[static_cast<std::size_t>(i)];
        if (di < 0) continue;
        sys.rhs[di] += rhs[i];
        for (SparseMatrix::InnerIterator it(matrix, i); it; ++it) {
            const int j = static_cast<int>(it.col());
            const int dj = sys.dof_of_node[static_cast<std::size_t>(j)];
            if (dj >= 0) trips.emplace_back(di, dj, it.value());
            else sys.rhs[di] -= it.value() * values[static_cast<std::size_t>(j)];
        }
    }
    if (spec.zero_mean) {
        // Multiplier row: int v = sum_i v_i int phi_i, with int phi_i = |T| / 3 per triangle.
        Eigen::VectorXd weight = Eigen::VectorXd::Zero(next);
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
            const double w = triangle_area(mesh, t) / 3.0;
            for (int v : mesh.triangles[static_cast<std::size_t>(t)]) {
                const int d = sys.dof_of_node[static_cast<std::size_t>(v)];
                if (d >= 0) weight[d] += w;
            }
        }
        for (int d = 0; d < next; ++d) {
            trips.emplace_back(next, d, weight[d]);
            trips.emplace_back(d, next, weight[d]);
        }
    }
    sys.matrix = from_triplets(n, trips);
    return sys;
}

FEFunction::FEFunction(std::shared_ptr<const TriMesh> m, Eigen::VectorXd v) : mesh(std::move(m)), values(std::move(v)) {
    if (!mesh || values.size() != static_cast<Eigen::Index>(mesh->vertices.size()))
        throw Error(ErrorKind::MeshMismatch, "nodal vector length differs from the vertex count");
}

FEFunction FEFunction::zero(std::shared_ptr<const TriMesh> m) {
    const auto n = static_cast<Eigen::Index>(m->vertices.size());
    return FEFunction(std::move(m), Eigen::VectorXd::Zero(n));
}

double FEFunction::at(int t, const std::array<double, 3>& b) const {
    const auto& tri = mesh->triangles[static_cast<std::size_t>(t)];
    return b[0] * values[tri[0]] + b[1] * values[tri[1]] + b[2] * values[tri[2]];
}

Vec2 FEFunction::gradient(int t) const {
    const auto& tri = mesh->triangles[static_cast<std::size_t>(t)];
    const auto g = basis_gradients(*mesh, t);
    return values[tri[0]] * g[0] + values[tri[1]] * g[1] + values[tri[2]] * g[2];
}

void FEFunction::write_csv(std::ostream& out) const {
    out << "node_index,x,y,value\n";
    out << std::setprecision(17);
    for (std::size_t i = 0; i < mesh->vertices.size(); ++i) {
        const Vec2& p = mesh->vertices[i];
        out << i << ',' << p.x() << ',' << p.y() << ',' << values[static_cast<Eigen::Index>(i)] << '\n';
    }
}

FEFunction solve(const SparseSystem& sys, std::shared_ptr<const TriMesh> mesh, double tol, SolveStats* stats) {
    const Eigen::Index n = sys.matrix.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    double residual = 0.0;
    const double bnorm = sys.rhs.norm();
    if (n > 0 && bnorm > 0.0) {
        const Eigen::SparseMatrix<double> a = sys.matrix;  // column-major copy for SparseLU
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success)
            throw Error(ErrorKind::SolverBreakdown, "sparse LU factorization failed: " + lu.lastErrorMessage());
        x = lu.solve(sys.rhs);
        Eigen::VectorXd r = sys.rhs - a * x;
        residual = r.norm() / bnorm;
        for (int step = 0; step < 3 && residual > 0.01 * tol && std::isfinite(residual); ++step) {
            x += lu.solve(r);
            r = sys.rhs - a * x;
            residual = r.norm() / bnorm;
        }
        if (!(residual <= tol))
            throw Error(ErrorKind::SolverBreakdown, "relative residual " + std::to_string(residual) +
                                                        " exceeds tolerance " + std::to_string(tol));
    }
    if (stats) {
        stats->residual = residual;
        stats->multiplier = sys.has_multiplier && n > 0 ? x[n - 1] : 0.0;
    }

    const std::size_t nv = mesh->vertices.size();
    if (sys.dof_of_node.size() != nv) throw Error(ErrorKind::MeshMismatch, "system was built for another mesh");
    Eigen::VectorXd values(static_cast<Eigen::Index>(nv));
    for (std::size_t v = 0; v < nv; ++v) {
        const int d = sys.dof_of_node[v];
        values[static_cast<Eigen::Index>(v)] = d >= 0 ? x[d] : sys.dirichlet_values[v];
    }
    return FEFunction(std::move(mesh), std::move(values));
}

double norm(const FEFunction& fn, NormKind kind, EdgeTag tag) {
    const TriMesh& mesh = *fn.mesh;
    double sum = 0.0;
    switch (kind) {
    case NormKind::L2Volume:
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
            const double area = triangle_area(mesh, t);
            for (const auto& b : quad::kTrianglePoints) {
                const double v = fn.at(t, b);
                sum += quad::kTriangleWeight * area * v * v;
            }
        }
        break;
    case NormKind::H1Semi:
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
            sum += triangle_area(mesh, t) * fn.gradient(t).squaredNorm();
        break;
    case NormKind::L2Surface:
        for (const auto& e : mesh.edges(tag)) {
            const double len = (mesh.vertices[e[1]] - mesh.vertices[e[0]]).norm();
            for (double s : quad::kEdgePoints) {
                const double v = (1.0 - s) * fn.values[e[0]] + s * fn.values[e[1]];
                sum += quad::kEdgeWeight * len * v * v;
            }
        }
        break;
    }
    return std::sqrt(sum);
}

double integrate(const TriMesh& mesh, const ScalarCoefficient& f) {
    double sum = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const double area = triangle_area(mesh, t);
        for (const auto& b : quad::kTrianglePoints)
            sum += quad::kTriangleWeight * area * f(eval_point(mesh, t, bary_point(mesh, t, b)));
    }
    return sum;
}

double integrate(const TriMesh& mesh, const ScalarCoefficient& f, EdgeTag tag) {
    double sum = 0.0;
    for (const auto& e : mesh.edges(tag)) {
        const Vec2& p = mesh.vertices[e[0]];
        const Vec2& q = mesh.vertices[e[1]];
        const double len = (q - p).norm();
        for (double s : quad::kEdgePoints) sum += quad::kEdgeWeight * len * f(edge_eval_point(mesh, p + s * (q - p)));
    }
    return sum;
}

double integrate(const FEFunction& fn) {
    const TriMesh& mesh = *fn.mesh;
    double sum = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
        sum += triangle_area(mesh, t) / 3.0 * (fn.values[tri[0]] + fn.values[tri[1]] + fn.values[tri[2]]);
    }
    return sum;
}

}  // namespace perfhom
