/// @file test_effective_model.cpp
/// @brief Homogenized coefficients and their exact discrete identities.

#include "perfhom/effective_model.hpp"
#include "perfhom/errors.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace perfhom;

namespace {

std::shared_ptr<const TriMesh> cell_mesh(double r, int level) {
    CellGeometry g;
    g.hole_radius = r;
    g.refinement = level;
    return std::make_shared<const TriMesh>(build_cell_mesh(g));
}

struct Built {
    std::shared_ptr<const TriMesh> mesh;
    CoefficientSet coefficients;
    CellSolutionSet cells;
    HomogenizedModel model;
};

Built build(double r, int level, const MatrixField& A, std::vector<std::array<double, 2>> modes,
            ScalarVolumeField mu = ScalarVolumeField::constant(1.0)) {
    Built b;
    b.mesh = cell_mesh(r, level);
    b.coefficients.A = A;
    b.coefficients.mu = mu;
    b.coefficients.alpha.fourier = std::move(modes);
    if (b.mesh->has_tag(EdgeTag::Sigma))
        b.coefficients.alpha = discrete_zero_mean_correction(b.coefficients.alpha, *b.mesh);
    b.cells = solve_cell_problems(b.mesh, A, b.coefficients.alpha);
    b.model = build_model(b.cells, b.coefficients);
    return b;
}

const MatrixField kNonsymmetric =
    MatrixField::trig(Mat2{{1.0, 0.5}, {0.0, 1.0}}, Mat2{{0.0, 0.3}, {0.0, 0.0}}, {1, 0});

double mat_gap(const Mat2& a, const Mat2& b) { return (a - b).norm() / std::max(a.norm(), b.norm()); }
double vec_gap(const Vec2& a, const Vec2& b, double floor) {
    return (a - b).norm() / std::max({a.norm(), b.norm(), floor});
}

// Rayleigh's expansion for a square array of insulating cylinders at area fraction phi.
double rayleigh_square_array(double phi) { return 1.0 - 2.0 * phi / (1.0 + phi - 0.305827 * std::pow(phi, 4)); }

}  // namespace

TEST(AHom, NoHoleConstantA) {
    EXPECT_LE((build(0.0, 3, MatrixField{}, {}).model.A_hom - Mat2::Identity()).norm(), 1e-10);
    const Mat2 d{{2.0, 0.0}, {0.0, 3.0}};
    EXPECT_LE((build(0.0, 3, MatrixField::constant(d), {}).model.A_hom - d).norm(), 1e-10);
}

TEST(AHom, FormsAgreeForNonsymmetricA) {
    const Built b = build(0.25, 4, kNonsymmetric, {{1.0, 0.0}, {0.0, 0.5}});
    EXPECT_LE(mat_gap(b.model.a_forms.definition, b.model.a_forms.energy), 1e-9);
    EXPECT_EQ(compute_A_hom(b.cells, kNonsymmetric), b.model.A_hom);
}

TEST(AHom, IsotropicHoleBoundsAndOracle) {
    std::vector<double> a;
    for (int level : {4, 5, 6}) {
        const Built b = build(0.25, level, MatrixField{}, {});
        const Mat2& h = b.model.A_hom;
        EXPECT_NEAR(h(0, 0), h(1, 1), 1e-10);
        EXPECT_LE(std::abs(h(0, 1)), 1e-10);
        EXPECT_GT(h(0, 0), 0.0);
        EXPECT_LE(h(0, 0), integrate(*b.mesh, [](const EvalPoint&) { return 1.0; }) + 1e-12);
        a.push_back(h(0, 0));
    }
    const double richardson = (4.0 * a[2] - a[1]) / 3.0;
    EXPECT_LE(a[0], 1.0 - std::numbers::pi / 16.0 + 0.02);
    EXPECT_NEAR(a[0], richardson, 0.02 * richardson);
    EXPECT_NEAR(richardson, rayleigh_square_array(std::numbers::pi / 16.0), 2e-3);
}

TEST(AHom, SymmetricAGivesSymmetricTensorBelowVoigt) {
    const MatrixField A = MatrixField::trig(Mat2{{2.0, 0.4}, {0.4, 1.0}}, Mat2{{0.5, 0.1}, {0.1, 0.2}}, {1, 1});
    const Built b = build(0.25, 4, A, {{0.3, 0.0}});
    const Mat2& h = b.model.A_hom;
    EXPECT_LE(std::abs(h(0, 1) - h(1, 0)), 1e-9 * h.norm());
    for (const Vec2& xi : {Vec2(1, 0), Vec2(0, 1), Vec2(1, 1).normalized()}) {
        const double voigt = integrate(*b.mesh, [&](const EvalPoint& p) { return xi.dot(A(p.y) * xi); });
        EXPECT_LE(xi.dot(h * xi), voigt + 1e-12);
    }
}

TEST(AHom, VoigtBoundOnSymmetricPartForNonsymmetricA) {
    const Built b = build(0.25, 4, kNonsymmetric, {});
    const Mat2 sym = 0.5 * (b.model.A_hom + b.model.A_hom.transpose());
    for (const Vec2& xi : {Vec2(1, 0), Vec2(0, 1), Vec2(1, 1).normalized()}) {
        const double voigt = integrate(*b.mesh, [&](const EvalPoint& p) { return xi.dot(kNonsymmetric(p.y) * xi); });
        EXPECT_LE(xi.dot(sym * xi), voigt + 1e-12);
    }
}

TEST(B, ZeroWithoutResistivity) {
    EXPECT_EQ(build(0.25, 4, kNonsymmetric, {}).model.B.norm(), 0.0);
}

TEST(B, VanishesForSymmetricA) {
    const std::vector<MatrixField> cases{
        MatrixField::constant(Mat2{{3.0, 0.0}, {0.0, 1.0}}),
        MatrixField::constant(Mat2{{2.0, 0.6}, {0.6, 1.0}}),
        MatrixField::trig(Mat2{{1.5, 0.2}, {0.2, 1.0}}, Mat2{{0.4, 0.3}, {0.3, 0.2}}, {1, 2}),
    };
    for (const auto& A : cases) {
        const Built b = build(0.25, 4, A, {{1.0, 0.0}, {0.0, 0.5}});
        EXPECT_LE(b.model.B.norm(), 1e-8 * std::max(1.0, A.c.norm()));
    }
}

TEST(B, ThreeFormsAgree) {
    const Built b = build(0.25, 4, kNonsymmetric, {{1.0, 0.0}, {0.0, 0.5}});
    const double scale = b.model.B.norm();
    EXPECT_GT(scale, 1e-3);
    EXPECT_LE(vec_gap(b.model.b_forms.direct, b.model.b_forms.substituted, 0.0), 1e-9);
    EXPECT_LE(vec_gap(b.model.b_forms.direct, b.model.b_forms.antisymmetric, 0.0), 1e-9);
}

TEST(B, NonsymmetricRegressionAndRefinement) {
    std::vector<Vec2> bs;
    for (int level : {4, 5, 6}) bs.push_back(build(0.25, level, kNonsymmetric, {{1.0, 0.0}}).model.B);
    EXPECT_NEAR(bs[0][0], 0.0106228312153627, 1e-9);
    EXPECT_NEAR(bs[0][1], 0.106347622953372, 1e-9);
    // Second-order convergence of the refined-mesh sequence.
    EXPECT_NEAR((bs[1] - bs[0]).norm() / (bs[2] - bs[1]).norm(), 4.0, 0.8);
}

TEST(Lambda, Examples) {
    const Built holed = build(0.25, 4, MatrixField{}, {});
    EXPECT_EQ(holed.model.lambda, holed.model.mu_tilde);
    EXPECT_NEAR(holed.model.lambda, 1.0 - std::numbers::pi / 16.0, 0.02);
    const Built plain = build(0.0, 3, MatrixField{}, {});
    EXPECT_NEAR(plain.model.lambda, 1.0, 1e-12);
    EXPECT_NEAR(plain.model.mu_tilde, 1.0, 1e-12);

    const Built cosine = build(0.25, 4, MatrixField{}, {{1.0, 0.0}});
    EXPECT_LT(cosine.model.lambda, cosine.model.mu_tilde);
    EXPECT_LE(relative_gap(cosine.model.lambda_forms.surface, cosine.model.lambda_forms.energy), 1e-9);
}

TEST(Lambda, CosineResistivityMatchesCorrectorEnergy) {
    // For A = I and alpha = cos(theta) on a centred hole, gamma and zeta_1 solve the same
    // Neumann problem up to sign, so lambda = |Y_s| - int |grad zeta_1|^2 = a*.
    double previous = 1.0;
    for (int level : {4, 5, 6}) {
        const Built b = build(0.25, level, MatrixField{}, {{1.0, 0.0}});
        const double gap = std::abs(b.model.lambda - b.model.A_hom(0, 0));
        EXPECT_LT(gap, previous);
        previous = gap;
    }
    EXPECT_LT(previous, 1e-4);
}

TEST(Lambda, TrigMu) {
    const Built b = build(0.25, 4, kNonsymmetric, {{0.5, 0.2}}, ScalarVolumeField::trig(2.0, 0.5, {0, 1}));
    EXPECT_NEAR(b.model.mu_tilde, 2.0 * integrate(*b.mesh, [](const EvalPoint&) { return 1.0; }), 1e-3);
    EXPECT_LE(b.model.lambda, b.model.mu_tilde);
    EXPECT_LE(relative_gap(b.model.lambda_forms.surface, b.model.lambda_forms.energy), 1e-9);
}

TEST(F, Examples) {
    const auto m = cell_mesh(0.25, 4);
    const double area = integrate(*m, [](const EvalPoint&) { return 1.0; });
    SourceField f = compute_F(SourceField::constant(1.0), SourceField{}, *m);
    EXPECT_NEAR(f(Vec2(0.3, 0.3), Vec2::Zero()), area, 1e-14);
    EXPECT_NEAR(area, 1.0 - std::numbers::pi / 16.0, 0.02);

    f = compute_F(SourceField{}, SourceField::constant(1.0), *m);
    EXPECT_NEAR(f(Vec2(0.3, 0.3), Vec2::Zero()), std::numbers::pi / 2.0, 0.02 * std::numbers::pi / 2.0);

    SourceField odd;
    odd.terms.push_back({1.0, {}, {0, 1}});
    f = compute_F(odd, SourceField{}, *m);
    EXPECT_LE(std::abs(f(Vec2(0.3, 0.3), Vec2::Zero())), 1e-3);

    // Macro factors are carried through unchanged.
    SourceField mixed;
    mixed.terms.push_back({2.0, {1, 1}, {}});
    f = compute_F(mixed, SourceField{}, *m);
    EXPECT_NEAR(f(Vec2(0.1, 0.125), Vec2::Zero()), 2.0 * area * std::sin(std::numbers::pi / 4.0), 1e-13);
}

TEST(Model, IdentityCollapse) {
    const Built b = build(0.0, 3, MatrixField{}, {});
    EXPECT_LE((b.model.A_hom - Mat2::Identity()).norm(), 1e-10);
    EXPECT_EQ(b.model.B.norm(), 0.0);
    EXPECT_NEAR(b.model.lambda, 1.0, 1e-12);
    EXPECT_NEAR(b.model.mu_tilde, 1.0, 1e-12);
}

TEST(Model, InvariantsAndProvenance) {
    const Built b = build(0.25, 4, kNonsymmetric, {{1.0, 0.0}, {0.0, 0.5}});
    const Mat2 sym = 0.5 * (b.model.A_hom + b.model.A_hom.transpose());
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Mat2>(sym).eigenvalues().minCoeff(), 0.0);
    EXPECT_LE(b.model.lambda, b.model.mu_tilde);
    EXPECT_EQ(b.model.provenance.cell_mesh, b.mesh->fingerprint());
    EXPECT_EQ(b.model.provenance.coefficients, fingerprint(b.coefficients));

    const nlohmann::json j = to_json(b.model);
    for (const char* key : {"A_hom", "B", "lambda", "mu_tilde", "F", "provenance"}) EXPECT_TRUE(j.contains(key));
    EXPECT_DOUBLE_EQ(j["A_hom"][0][1].get<double>(), b.model.A_hom(0, 1));
}

TEST(Model, MeshMismatch) {
    Built b = build(0.25, 4, MatrixField{}, {});
    b.cells.gamma = FEFunction::zero(cell_mesh(0.25, 5));
    try {
        build_model(b.cells, b.coefficients);
        FAIL() << "expected MeshMismatch";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::MeshMismatch);
    }
}
