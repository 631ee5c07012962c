/// @file effective_model.hpp
/// @brief Homogenized coefficients A_hom, B, lambda, mu_tilde and macro source F.

#pragma once

#include "perfhom/cell_problems.hpp"

#include <nlohmann/json_fwd.hpp>

#include <cstdint>

namespace perfhom {

struct Provenance {
    std::uint64_t cell_mesh = 0;
    std::uint64_t coefficients = 0;

    bool operator==(const Provenance&) const = default;
};

/// a_ij = int (a_ij + sum_k a_ik d_k zeta_j)  and  int A(e_j + grad zeta_j) . (e_i + grad zeta_i).
struct AHomForms {
    Mat2 definition = Mat2::Zero();
    Mat2 energy = Mat2::Zero();
};

/// Three equivalent expressions of the convection vector.
struct BForms {
    Vec2 direct = Vec2::Zero();         ///< int_Sigma alpha zeta_i - int (A grad gamma)_i
    Vec2 substituted = Vec2::Zero();    ///< -int (A grad gamma) . (e_i + grad zeta_i)
    Vec2 antisymmetric = Vec2::Zero();  ///< int grad gamma^T (A - A^T)(e_i + grad zeta_i)
};

struct LambdaForms {
    double surface = 0.0;  ///< int_Sigma alpha gamma + mu_tilde
    double energy = 0.0;   ///< -int A grad gamma . grad gamma + mu_tilde
    double mu_tilde = 0.0;
};

struct HomogenizedModel {
    Mat2 A_hom = Mat2::Identity();
    Vec2 B = Vec2::Zero();
    double lambda = 1.0;
    double mu_tilde = 1.0;
    SourceField F;  ///< x-only: every term has a constant micro factor
    Provenance provenance;

    AHomForms a_forms;
    BForms b_forms;
    LambdaForms lambda_forms;
};

/// Throws MeshMismatch unless every field of `cells` lives on cells.mesh.
void check_same_mesh(const CellSolutionSet& cells);

AHomForms compute_A_hom_forms(const CellSolutionSet& cells, const MatrixField& A);
/// Definition form.
Mat2 compute_A_hom(const CellSolutionSet& cells, const MatrixField& A);

BForms compute_B_forms(const CellSolutionSet& cells, const MatrixField& A, const SurfaceResistivity& alpha);
Vec2 compute_B(const CellSolutionSet& cells, const MatrixField& A, const SurfaceResistivity& alpha);

LambdaForms compute_lambda_forms(const CellSolutionSet& cells, const MatrixField& A, const SurfaceResistivity& alpha,
                                 const ScalarVolumeField& mu);

/// F(x) = sum_j u_j(x) (int_{Y_s} v_j(y) dy) for f, plus the same over Sigma for g.
SourceField compute_F(const SourceField& f, const SourceField& g, const TriMesh& cell);

/// Bundles all coefficients; throws NotElliptic if the symmetric part of A_hom is not
/// positive definite and SolverBreakdown if lambda exceeds mu_tilde.
HomogenizedModel build_model(const CellSolutionSet& cells, const CoefficientSet& coefficients);

/// Relative gap |a - b| / max(|a|, |b|, floor).
double relative_gap(double a, double b, double floor = 0.0);

nlohmann::json to_json(const HomogenizedModel& model);
nlohmann::json to_json(const SourceField& field);

}  // namespace perfhom
