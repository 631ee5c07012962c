#include "perfhom/macro_solver.hpp"

#include "perfhom/errors.hpp"

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include <cmath>
#include <ostream>
#include <string>

namespace perfhom {

namespace {

Vec2 wrap_unit(const Vec2& y) { return {y.x() - std::floor(y.x()), y.y() - std::floor(y.y())}; }

}  // namespace

std::shared_ptr<const TriMesh> build_macro_mesh(int refinement) {
    CellGeometry g;
    g.hole_radius = 0.0;
    g.refinement = refinement;
    return std::make_shared<const TriMesh>(tile_perforated_mesh(build_cell_mesh(g), 1));
}

double MacroSolution::value(const Vec2& x) const {
    const Location loc = locator->locate_nearest(x);
    return u.at(loc.triangle, loc.bary);
}

Vec2 MacroSolution::gradient(const Vec2& x) const { return u.gradient(locator->locate_nearest(x).triangle); }

MacroSolution solve_homogenized(const HomogenizedModel& model, std::shared_ptr<const TriMesh> macro_mesh, double tol) {
    const Mat2 sym = 0.5 * (model.A_hom + model.A_hom.transpose());
    const double lo = Eigen::SelfAdjointEigenSolver<Mat2>(sym).eigenvalues().minCoeff();
    if (!(lo > 0.0))
        throw Error(ErrorKind::NotElliptic, "symmetric part of A_hom has eigenvalue " + std::to_string(lo));

    const Mat2 a = model.A_hom;
    const double lambda = model.lambda;
    const std::vector<FormDescriptor> terms{
        Diffusion{[a](const EvalPoint&) { return a; }},
        Convection{model.B},
        VolumeReaction{[lambda](const EvalPoint&) { return lambda; }},
    };
    const SparseMatrix k = assemble_bilinear(*macro_mesh, terms);
    const SourceField f = model.F;
    const Eigen::VectorXd b = assemble_load(*macro_mesh, [&f](const EvalPoint& p) { return f(p.x, p.y); });
    ConstraintSpec spec;
    spec.dirichlet = EdgeTag::Gamma;
    const SparseSystem sys = apply_constraints(k, b, *macro_mesh, spec);

    MacroSolution sol;
    SolveStats stats;
    sol.u = solve(sys, macro_mesh, tol, &stats);
    sol.residual = stats.residual;
    sol.mesh = std::move(macro_mesh);
    sol.model = model;
    sol.locator = std::make_shared<const PointLocator>(*sol.mesh);
    sol.peclet = model.B.norm() * sol.mesh->h_max / (2.0 * lo);
    sol.peclet_warning = sol.peclet >= 1.0;
    return sol;
}

CorrectorEvaluator::CorrectorEvaluator(std::shared_ptr<const MacroSolution> macro,
                                       std::shared_ptr<const CellSolutionSet> cells)
    : macro_(std::move(macro)), cells_(std::move(cells)),
      cell_locator_(std::make_shared<const PointLocator>(*cells_->mesh)) {}

CellSample CorrectorEvaluator::sample(int t, const std::array<double, 3>& bary) const {
    CellSample s;
    for (int k = 0; k < 2; ++k) {
        s.zeta[static_cast<std::size_t>(k)] = cells_->zeta(k).at(t, bary);
        s.grad_zeta[static_cast<std::size_t>(k)] = cells_->zeta(k).gradient(t);
    }
    s.gamma = cells_->gamma.at(t, bary);
    s.grad_gamma = cells_->gamma.gradient(t);
    return s;
}

CellSample CorrectorEvaluator::sample(const Vec2& y) const {
    const Location loc = cell_locator_->locate_nearest(wrap_unit(y));
    return sample(loc.triangle, loc.bary);
}

double CorrectorEvaluator::combine(const CellSample& s, double u, const Vec2& grad_u) {
    return s.zeta[0] * grad_u[0] + s.zeta[1] * grad_u[1] + s.gamma * u;
}

Vec2 CorrectorEvaluator::combine_grad(const CellSample& s, double u, const Vec2& grad_u) {
    return s.grad_zeta[0] * grad_u[0] + s.grad_zeta[1] * grad_u[1] + s.grad_gamma * u;
}

double CorrectorEvaluator::value(const Vec2& x, const Vec2& y) const {
    return combine(sample(y), macro_->value(x), macro_->gradient(x));
}

Vec2 CorrectorEvaluator::grad_y(const Vec2& x, const Vec2& y) const {
    return combine_grad(sample(y), macro_->value(x), macro_->gradient(x));
}

CorrectorEvaluator reconstruct_u1(std::shared_ptr<const MacroSolution> macro,
                                  std::shared_ptr<const CellSolutionSet> cells) {
    check_same_mesh(*cells);
    if (macro->model.provenance.cell_mesh != cells->mesh->fingerprint())
        throw Error(ErrorKind::ProvenanceMismatch, "macro model was built on a different cell mesh");
    return CorrectorEvaluator(std::move(macro), std::move(cells));
}

Vec2 CorrectedField::micro(const Vec2& x) const { return x / eps_; }

double CorrectedField::value(const Vec2& x) const {
    const auto& m = u1_.macro();
    const double u = m.value(x);
    return u + eps_ * CorrectorEvaluator::combine(u1_.sample(micro(x)), u, m.gradient(x));
}

Vec2 CorrectedField::gradient(const Vec2& x) const {
    const auto& m = u1_.macro();
    const Vec2 g = m.gradient(x);
    return g + CorrectorEvaluator::combine_grad(u1_.sample(micro(x)), m.value(x), g);
}

CorrectedField corrected_field(std::shared_ptr<const MacroSolution> macro,
                               std::shared_ptr<const CellSolutionSet> cells, double eps) {
    return CorrectedField(reconstruct_u1(std::move(macro), std::move(cells)), eps);
}

void write_samples_csv(const CorrectedField& field, std::span<const Vec2> points, std::ostream& out) {
    out << "x1,x2,value,grad1,grad2\n";
    for (const Vec2& x : points) {
        const Vec2 g = field.gradient(x);
        out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", x.x(), x.y(), field.value(x), g.x(), g.y());
    }
}

}  // namespace perfhom
