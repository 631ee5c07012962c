/// @file cell_problems.hpp
/// @brief Periodic cell problems on Y_s: correctors zeta_k, resistivity potential gamma, auxiliary theta.

#pragma once

#include "perfhom/coefficients.hpp"
#include "perfhom/fem.hpp"

#include <array>
#include <memory>

namespace perfhom {

struct CellSolutionSet {
    std::shared_ptr<const TriMesh> mesh;
    FEFunction zeta1;
    FEFunction zeta2;
    FEFunction gamma;
    FEFunction theta;
    std::array<double, 4> residuals{};  ///< zeta1, zeta2, gamma, theta

    const FEFunction& zeta(int k) const { return k == 0 ? zeta1 : zeta2; }
};

/// int A(e_k + grad zeta_k) . grad v = 0 for periodic v, zero mean. k is 0 or 1.
FEFunction solve_corrector(std::shared_ptr<const TriMesh> cell, const MatrixField& A, int k, double tol = 1e-10,
                           double* residual = nullptr);

/// int A grad gamma . grad v = -int_Sigma alpha v, zero mean.
/// Throws Incompatible when the discrete Sigma integral of alpha exceeds 1e-10.
FEFunction solve_gamma(std::shared_ptr<const TriMesh> cell, const MatrixField& A, const SurfaceResistivity& alpha,
                       double tol = 1e-10, double* residual = nullptr);

/// int grad theta . grad v = int_Sigma alpha v, zero mean.
FEFunction solve_theta(std::shared_ptr<const TriMesh> cell, const SurfaceResistivity& alpha, double tol = 1e-10,
                       double* residual = nullptr);

/// All four solves; they are independent and run concurrently.
CellSolutionSet solve_cell_problems(std::shared_ptr<const TriMesh> cell, const MatrixField& A,
                                    const SurfaceResistivity& alpha, double tol = 1e-10);

/// Wraps a catalog field as an assembly coefficient evaluated at the cell coordinate.
MatrixCoefficient micro_coefficient(const MatrixField& A);
ScalarCoefficient micro_coefficient(const ScalarVolumeField& mu);
ScalarCoefficient micro_coefficient(const SurfaceResistivity& alpha);

}  // namespace perfhom
