#include "perfhom/fine_solver.hpp"

#include "perfhom/cell_problems.hpp"
#include "perfhom/errors.hpp"

#include <Eigen/SparseCholesky>
#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <random>
#include <string>

namespace perfhom {

FineProblem make_fine_problem(std::shared_ptr<const TriMesh> cell, const CoefficientSet& coefficients, int tiles) {
    if (tiles < 1) throw Error(ErrorKind::InvalidConfig, "tile count must be positive");
    FineProblem p;
    p.tiles = tiles;
    p.eps = 1.0 / tiles;
    p.mesh = std::make_shared<const TriMesh>(tile_perforated_mesh(*cell, tiles));
    p.cell = std::move(cell);
    p.coefficients = coefficients;
    return p;
}

CoercivityCheck check_coercivity(double m, double mu0, double trace_constant, double alpha_max) {
    CoercivityCheck c;
    c.m = m;
    c.mu0 = mu0;
    c.trace_constant = trace_constant;
    c.alpha_max = alpha_max;
    const double root = std::sqrt(mu0 * m);
    c.ok = root > trace_constant * alpha_max;
    c.c0 = (1.0 - trace_constant * alpha_max / root) * std::min(m, mu0);
    return c;
}

TraceConstant estimate_trace_constant(const TriMesh& cell, double delta, double tol, int max_iterations) {
    if (!cell.has_tag(EdgeTag::Sigma)) throw Error(ErrorKind::EmptySigma, "cell mesh has no hole boundary");
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidConfig, "delta must be positive");
    const auto one = [](const EvalPoint&) { return 1.0; };
    const SparseMatrix ms = assemble_bilinear(cell, SurfaceReaction{one, EdgeTag::Sigma});
    const SparseMatrix s = assemble_bilinear(
        cell, std::vector<FormDescriptor>{VolumeReaction{[delta](const EvalPoint&) { return 1.0 / delta; }},
                                          Diffusion{[delta](const EvalPoint&) -> Mat2 {
                                              return delta * Mat2::Identity();
                                          }}});
    const Eigen::SparseMatrix<double> pencil = s;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(pencil);
    if (ldlt.info() != Eigen::Success) throw Error(ErrorKind::SolverBreakdown, "trace pencil factorization failed");

    // A fixed pseudo-random start avoids being trapped in a symmetry subspace.
    std::mt19937_64 rng(20240531);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd x(static_cast<Eigen::Index>(cell.vertices.size()));
    for (auto& v : x) v = 1.0 + 0.5 * dist(rng);

    TraceConstant out;
    out.delta = delta;
    double previous = 0.0;
    for (int it = 1; it <= max_iterations; ++it) {
        x = ldlt.solve(ms * x);
        x /= x.norm();
        const double lambda = x.dot(ms * x) / x.dot(s * x);
        out.value = lambda;
        out.iterations = it;
        if (it > 1 && std::abs(lambda - previous) <= tol * std::abs(lambda)) return out;
        previous = lambda;
    }
    throw Error(ErrorKind::SolverBreakdown, "trace-constant power iteration did not converge");
}

FEFunction solve_robin_fine(const FineProblem& p, const CoercivityCheck& gate, double tol, bool force,
                            double* residual) {
    if (!gate.ok && !force)
        throw Error(ErrorKind::CoercivityFailed,
                    fmt::format("sqrt(mu0 m) = {:.6g} does not exceed C_s |alpha|_inf = {:.6g}",
                                std::sqrt(gate.mu0 * gate.m), gate.trace_constant * gate.alpha_max));
    const auto& c = p.coefficients;
    const TriMesh& mesh = *p.mesh;
    std::vector<FormDescriptor> terms{Diffusion{micro_coefficient(c.A)}, VolumeReaction{micro_coefficient(c.mu)}};
    const bool holes = mesh.has_tag(EdgeTag::Sigma);
    if (holes && !c.alpha.is_zero()) terms.push_back(SurfaceReaction{micro_coefficient(c.alpha), EdgeTag::Sigma});
    const SparseMatrix k = assemble_bilinear(mesh, terms);

    const SourceField f = c.f;
    const SourceField g = c.g;
    Eigen::VectorXd b = assemble_load(mesh, [&f](const EvalPoint& q) { return f(q.x, q.y); });
    if (holes && !g.is_zero())
        b += p.eps * assemble_load(mesh, [&g](const EvalPoint& q) { return g(q.x, q.y); }, EdgeTag::Sigma);

    ConstraintSpec spec;
    spec.dirichlet = EdgeTag::Gamma;
    SolveStats stats;
    FEFunction u = solve(apply_constraints(k, b, mesh, spec), p.mesh, tol, &stats);
    if (residual) *residual = stats.residual;
    return u;
}

AprioriReport apriori_report(const FEFunction& u, const FineProblem& p, const CoercivityCheck& gate) {
    AprioriReport r;
    r.eps = p.eps;
    r.h = p.mesh->h_max;
    r.grad_norm = norm(u, NormKind::H1Semi);
    r.l2_norm = norm(u, NormKind::L2Volume);
    const bool holes = p.mesh->has_tag(EdgeTag::Sigma);
    r.sigma_norm = holes ? norm(u, NormKind::L2Surface, EdgeTag::Sigma) : 0.0;
    const SourceField f = p.coefficients.f;
    const SourceField g = p.coefficients.g;
    r.f_norm = std::sqrt(integrate(*p.mesh, [&f](const EvalPoint& q) { return std::pow(f(q.x, q.y), 2); }));
    if (holes) {
        const double g2 = integrate(*p.mesh, [&g](const EvalPoint& q) { return std::pow(g(q.x, q.y), 2); },
                                    EdgeTag::Sigma);
        r.sqrt_eps_g_norm = std::sqrt(p.eps * g2);
    }
    r.c0 = gate.c0;
    r.coercive = gate.ok;
    return r;
}

void write_report_csv(std::span<const AprioriReport> rows, std::ostream& out) {
    out << "eps,h,grad_norm,l2_norm,sigma_norm,f_norm,sqrt_eps_g_norm,c0,coercive\n";
    for (const auto& r : rows)
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.eps, r.h,
                           r.grad_norm, r.l2_norm, r.sigma_norm, r.f_norm, r.sqrt_eps_g_norm, r.c0, r.coercive ? 1 : 0);
}

}  // namespace perfhom
