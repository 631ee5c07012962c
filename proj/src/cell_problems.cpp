#include "perfhom/cell_problems.hpp"

#include "perfhom/errors.hpp"

#include <cmath>
#include <future>
#include <string>

namespace perfhom {

namespace {

constexpr double kCompatibilityTol = 1e-10;

FEFunction solve_periodic(const std::shared_ptr<const TriMesh>& cell, const SparseMatrix& k, const Eigen::VectorXd& b,
                          double tol, double* residual) {
    ConstraintSpec spec;
    spec.periodic = true;
    spec.zero_mean = true;
    const SparseSystem sys = apply_constraints(k, b, *cell, spec);
    SolveStats stats;
    FEFunction u = solve(sys, cell, tol, &stats);
    if (residual) *residual = stats.residual;
    return u;
}

void check_compatible(const TriMesh& cell, const SurfaceResistivity& alpha) {
    const double mean = discrete_sigma_integral(alpha, cell);
    if (std::abs(mean) > kCompatibilityTol)
        throw Error(ErrorKind::Incompatible,
                    "discrete integral of alpha over Sigma is " + std::to_string(mean) + ", not zero");
}

// gamma and theta share everything but the operator and the sign of the flux.
FEFunction solve_surface_driven(const std::shared_ptr<const TriMesh>& cell, const SparseMatrix& k,
                                const SurfaceResistivity& alpha, double sign, double tol, double* residual) {
    if (!cell->has_tag(EdgeTag::Sigma) || alpha.is_zero()) {
        if (residual) *residual = 0.0;
        return FEFunction::zero(cell);
    }
    check_compatible(*cell, alpha);
    const Eigen::VectorXd b = sign * assemble_load(*cell, micro_coefficient(alpha), EdgeTag::Sigma);
    return solve_periodic(cell, k, b, tol, residual);
}

}  // namespace

MatrixCoefficient micro_coefficient(const MatrixField& A) {
    return [A](const EvalPoint& p) { return A(p.y); };
}

ScalarCoefficient micro_coefficient(const ScalarVolumeField& mu) {
    return [mu](const EvalPoint& p) { return mu(p.y); };
}

ScalarCoefficient micro_coefficient(const SurfaceResistivity& alpha) {
    return [alpha](const EvalPoint& p) { return alpha.at(p.y); };
}

FEFunction solve_corrector(std::shared_ptr<const TriMesh> cell, const MatrixField& A, int k, double tol,
                           double* residual) {
    const SparseMatrix stiffness = assemble_bilinear(*cell, Diffusion{micro_coefficient(A)});
    const Eigen::VectorXd b = -assemble_flux_load(*cell, [&A, k](const EvalPoint& p) -> Vec2 {
        return A(p.y).col(k);
    });
    return solve_periodic(cell, stiffness, b, tol, residual);
}

FEFunction solve_gamma(std::shared_ptr<const TriMesh> cell, const MatrixField& A, const SurfaceResistivity& alpha,
                       double tol, double* residual) {
    const SparseMatrix stiffness = assemble_bilinear(*cell, Diffusion{micro_coefficient(A)});
    return solve_surface_driven(cell, stiffness, alpha, -1.0, tol, residual);
}

FEFunction solve_theta(std::shared_ptr<const TriMesh> cell, const SurfaceResistivity& alpha, double tol,
                       double* residual) {
    const SparseMatrix stiffness = assemble_bilinear(*cell, Diffusion{[](const EvalPoint&) -> Mat2 {
        return Mat2::Identity();
    }});
    return solve_surface_driven(cell, stiffness, alpha, 1.0, tol, residual);
}

CellSolutionSet solve_cell_problems(std::shared_ptr<const TriMesh> cell, const MatrixField& A,
                                    const SurfaceResistivity& alpha, double tol) {
    CellSolutionSet out;
    out.mesh = cell;
    auto z1 = std::async(std::launch::async, [&] { return solve_corrector(cell, A, 0, tol, &out.residuals[0]); });
    auto z2 = std::async(std::launch::async, [&] { return solve_corrector(cell, A, 1, tol, &out.residuals[1]); });
    auto g = std::async(std::launch::async, [&] { return solve_gamma(cell, A, alpha, tol, &out.residuals[2]); });
    out.theta = solve_theta(cell, alpha, tol, &out.residuals[3]);
    out.zeta1 = z1.get();
    out.zeta2 = z2.get();
    out.gamma = g.get();
    return out;
}

}  // namespace perfhom
