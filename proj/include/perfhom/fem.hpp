/// @file fem.hpp
/// @brief P1 finite elements on triangle meshes: assembly, constraints, solves, norms.

#pragma once

#include "perfhom/mesh.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace perfhom {

/// Coefficients see the physical point x and the cell coordinate y of the same point.
struct EvalPoint {
    Vec2 x;
    Vec2 y;
};

using MatrixCoefficient = std::function<Mat2(const EvalPoint&)>;
using VectorCoefficient = std::function<Vec2(const EvalPoint&)>;
using ScalarCoefficient = std::function<double(const EvalPoint&)>;

/// Integrand (A grad u) . grad v
struct Diffusion {
    MatrixCoefficient A;
};
/// Integrand (b . grad u) v
struct Convection {
    Vec2 b;
};
/// Integrand w u v
struct VolumeReaction {
    ScalarCoefficient w;
};
/// Edge integrand alpha u v on a tagged group
struct SurfaceReaction {
    ScalarCoefficient alpha;
    EdgeTag tag = EdgeTag::Sigma;
};

using FormDescriptor = std::variant<Diffusion, Convection, VolumeReaction, SurfaceReaction>;

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Row i holds the test function phi_i, column j the trial function phi_j.
SparseMatrix assemble_bilinear(const TriMesh& mesh, const FormDescriptor& term);

/// Sum of several terms (same pattern as adding the individual matrices).
SparseMatrix assemble_bilinear(const TriMesh& mesh, const std::vector<FormDescriptor>& terms);

/// Volume load int f phi_i.
Eigen::VectorXd assemble_load(const TriMesh& mesh, const ScalarCoefficient& f);
/// Edge load int_tag g phi_i. Throws MissingTag.
Eigen::VectorXd assemble_load(const TriMesh& mesh, const ScalarCoefficient& g, EdgeTag tag);
/// Flux load int q . grad phi_i.
Eigen::VectorXd assemble_flux_load(const TriMesh& mesh, const VectorCoefficient& q);

/// Element average of A over the triangle quadrature points. Since P1 gradients are
/// constant per element, every diffusion integral only sees this average.
Mat2 element_matrix_average(const TriMesh& mesh, int t, const MatrixCoefficient& A);
/// Constant gradients of the three barycentric basis functions on triangle t.
std::array<Vec2, 3> basis_gradients(const TriMesh& mesh, int t);
/// Micro/macro coordinates of a quadrature point inside triangle t.
EvalPoint eval_point(const TriMesh& mesh, int t, const Vec2& x);

struct ConstraintSpec {
    std::optional<EdgeTag> dirichlet;  ///< homogeneous unless dirichlet_value is set
    ScalarCoefficient dirichlet_value;
    bool periodic = false;
    bool zero_mean = false;
};

struct SparseSystem {
    SparseMatrix matrix;
    Eigen::VectorXd rhs;

    /// Constraint bookkeeping, filled by apply_constraints.
    std::vector<int> dof_of_node;  ///< -1 for Dirichlet nodes
    std::vector<double> dirichlet_values;
    int free_dofs = 0;
    bool has_multiplier = false;
};

/// Dirichlet elimination, periodic slave merging and an optional zero-mean multiplier row.
/// Throws MissingTag and ConflictingConstraints.
SparseSystem apply_constraints(const SparseMatrix& matrix, const Eigen::VectorXd& rhs, const TriMesh& mesh,
                               const ConstraintSpec& spec);

struct FEFunction {
    std::shared_ptr<const TriMesh> mesh;
    Eigen::VectorXd values;

    FEFunction() = default;
    FEFunction(std::shared_ptr<const TriMesh> m, Eigen::VectorXd v);
    static FEFunction zero(std::shared_ptr<const TriMesh> m);

    /// Linear interpolation inside triangle t at barycentric coordinates.
    double at(int t, const std::array<double, 3>& bary) const;
    Vec2 gradient(int t) const;

    void write_csv(std::ostream& out) const;
};

struct SolveStats {
    double residual = 0.0;
    double multiplier = 0.0;
};

/// Sparse LU with iterative refinement; throws SolverBreakdown if the relative residual
/// stays above `tol`. The result is expanded back to one value per mesh vertex.
FEFunction solve(const SparseSystem& sys, std::shared_ptr<const TriMesh> mesh, double tol = 1e-10,
                 SolveStats* stats = nullptr);

enum class NormKind { L2Volume, H1Semi, L2Surface };

double norm(const FEFunction& fn, NormKind kind, EdgeTag tag = EdgeTag::Sigma);

/// Quadrature of f over the mesh, and of f over a tagged edge group.
double integrate(const TriMesh& mesh, const ScalarCoefficient& f);
double integrate(const TriMesh& mesh, const ScalarCoefficient& f, EdgeTag tag);
/// int fn over the mesh volume.
double integrate(const FEFunction& fn);

}  // namespace perfhom
