/// @file macro_solver.hpp
/// @brief Homogenized macro problem on the unit square and two-scale reconstruction.

#pragma once

#include "perfhom/effective_model.hpp"
#include "perfhom/locator.hpp"

#include <iosfwd>
#include <memory>
#include <span>

namespace perfhom {

/// Hole-free mesh of the unit square with GAMMA tagged.
std::shared_ptr<const TriMesh> build_macro_mesh(int refinement);

struct MacroSolution {
    std::shared_ptr<const TriMesh> mesh;
    FEFunction u;
    HomogenizedModel model;
    std::shared_ptr<const PointLocator> locator;
    double peclet = 0.0;  ///< |B| h / (2 lambda_min(A_hom_sym))
    bool peclet_warning = false;
    double residual = 0.0;

    double value(const Vec2& x) const;
    /// P1 gradient on the macro element containing x.
    Vec2 gradient(const Vec2& x) const;
};

/// Galerkin solve of -div(A_hom grad u) + B.grad u + lambda u = F, u = 0 on GAMMA.
/// Throws NotElliptic and SolverBreakdown.
MacroSolution solve_homogenized(const HomogenizedModel& model, std::shared_ptr<const TriMesh> macro_mesh,
                                double tol = 1e-10);

/// Cell fields and their gradients at one micro point.
struct CellSample {
    std::array<double, 2> zeta{};
    double gamma = 0.0;
    std::array<Vec2, 2> grad_zeta{Vec2::Zero(), Vec2::Zero()};
    Vec2 grad_gamma = Vec2::Zero();
};

/// u1(x,y) = sum_k zeta_k(y) d_k u(x) + gamma(y) u(x).
class CorrectorEvaluator {
public:
    CorrectorEvaluator(std::shared_ptr<const MacroSolution> macro, std::shared_ptr<const CellSolutionSet> cells);

    double value(const Vec2& x, const Vec2& y) const;
    Vec2 grad_y(const Vec2& x, const Vec2& y) const;

    /// Cell sample at y (reduced mod 1; points inside the hole snap to the nearest element).
    CellSample sample(const Vec2& y) const;
    /// Cell sample at known barycentric coordinates of a cell triangle.
    CellSample sample(int cell_triangle, const std::array<double, 3>& bary) const;

    static double combine(const CellSample& s, double u, const Vec2& grad_u);
    static Vec2 combine_grad(const CellSample& s, double u, const Vec2& grad_u);

    const MacroSolution& macro() const { return *macro_; }
    const CellSolutionSet& cells() const { return *cells_; }

private:
    std::shared_ptr<const MacroSolution> macro_;
    std::shared_ptr<const CellSolutionSet> cells_;
    std::shared_ptr<const PointLocator> cell_locator_;
};

/// Throws ProvenanceMismatch if the macro model was not built from these cell solutions.
CorrectorEvaluator reconstruct_u1(std::shared_ptr<const MacroSolution> macro,
                                  std::shared_ptr<const CellSolutionSet> cells);

/// x -> u(x) + eps u1(x, x/eps), gradient grad u + grad_y u1 (the eps grad_x u1 term is dropped).
class CorrectedField {
public:
    CorrectedField(CorrectorEvaluator u1, double eps) : u1_(std::move(u1)), eps_(eps) {}

    double value(const Vec2& x) const;
    Vec2 gradient(const Vec2& x) const;
    double eps() const { return eps_; }

private:
    Vec2 micro(const Vec2& x) const;

    CorrectorEvaluator u1_;
    double eps_;
};

CorrectedField corrected_field(std::shared_ptr<const MacroSolution> macro,
                               std::shared_ptr<const CellSolutionSet> cells, double eps);

/// CSV `x1,x2,value,grad1,grad2` at the given points.
void write_samples_csv(const CorrectedField& field, std::span<const Vec2> points, std::ostream& out);

}  // namespace perfhom
