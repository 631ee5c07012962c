/// @file test_macro_solver.cpp
/// @brief Macro problem against series and finite-difference oracles; two-scale reconstruction.

#include "perfhom/errors.hpp"
#include "perfhom/macro_solver.hpp"

#include <gtest/gtest.h>

#include <Eigen/SparseLU>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace perfhom;

namespace {

constexpr double kPi = std::numbers::pi;

HomogenizedModel plain_model(const Mat2& A, const Vec2& B, double lambda, SourceField F = SourceField::constant(1.0)) {
    HomogenizedModel m;
    m.A_hom = A;
    m.B = B;
    m.lambda = lambda;
    m.mu_tilde = lambda;
    m.F = std::move(F);
    return m;
}

// -Laplace u + u = 1 on the unit square, u = 0 on the boundary, as a double sine series.
double series_solution(const Vec2& x, int terms = 401) {
    double u = 0.0;
    for (int m = 1; m <= terms; m += 2)
        for (int n = 1; n <= terms; n += 2)
            u += 16.0 / (kPi * kPi * m * n) / (kPi * kPi * (m * m + n * n) + 1.0) * std::sin(m * kPi * x[0]) *
                 std::sin(n * kPi * x[1]);
    return u;
}

// Second-order central differences for constant coefficients on an n x n grid.
double finite_difference_centre(const Mat2& A, const Vec2& B, double lambda, int n) {
    const double h = 1.0 / n;
    const int m = n - 1;
    auto id = [m](int i, int j) { return (j - 1) * m + (i - 1); };
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m * m);
    const double cross = (A(0, 1) + A(1, 0)) / (4.0 * h * h);
    auto add = [&](int row, int i, int j, double v) {
        if (i > 0 && i < n && j > 0 && j < n) trip.emplace_back(row, id(i, j), v);
    };
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            const int r = id(i, j);
            add(r, i, j, 2.0 * A(0, 0) / (h * h) + 2.0 * A(1, 1) / (h * h) + lambda);
            add(r, i - 1, j, -A(0, 0) / (h * h) - B[0] / (2.0 * h));
            add(r, i + 1, j, -A(0, 0) / (h * h) + B[0] / (2.0 * h));
            add(r, i, j - 1, -A(1, 1) / (h * h) - B[1] / (2.0 * h));
            add(r, i, j + 1, -A(1, 1) / (h * h) + B[1] / (2.0 * h));
            add(r, i + 1, j + 1, -cross);
            add(r, i - 1, j - 1, -cross);
            add(r, i + 1, j - 1, cross);
            add(r, i - 1, j + 1, cross);
        }
    Eigen::SparseMatrix<double> K(m * m, m * m);
    K.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(K);
    const Eigen::VectorXd u = lu.solve(rhs);
    return u[id(n / 2, n / 2)];
}

std::shared_ptr<const CellSolutionSet> cell_solutions(double r, int level, const MatrixField& A,
                                                       const SurfaceResistivity& alpha) {
    CellGeometry g;
    g.hole_radius = r;
    g.refinement = level;
    auto mesh = std::make_shared<const TriMesh>(build_cell_mesh(g));
    SurfaceResistivity a = alpha;
    if (mesh->has_tag(EdgeTag::Sigma)) a = discrete_zero_mean_correction(alpha, *mesh);
    return std::make_shared<const CellSolutionSet>(solve_cell_problems(mesh, A, a));
}

}  // namespace

TEST(MacroMesh, UnitSquareWithGamma) {
    const auto m = build_macro_mesh(4);
    EXPECT_EQ(m->vertices.size(), 17u * 17u);
    EXPECT_FALSE(m->has_tag(EdgeTag::Sigma));
    EXPECT_EQ(m->edges(EdgeTag::Gamma).size(), 64u);
}

TEST(MacroSolve, SeriesOracleAtCentre) {
    const Vec2 centre(0.5, 0.5);
    const double exact = series_solution(centre);
    std::vector<double> err;
    for (int level : {5, 6}) {
        const auto s = solve_homogenized(plain_model(Mat2::Identity(), Vec2::Zero(), 1.0), build_macro_mesh(level));
        err.push_back(std::abs(s.value(centre) - exact));
        EXPECT_LE(err.back() / exact, 5e-3);
        EXPECT_LE(s.residual, 1e-10);
    }
    // Corner incompatibility of f = 1 with u = 0 costs a little of the h^2 rate.
    EXPECT_GT(err[0] / err[1], 3.0);
}

TEST(MacroSolve, FiniteDifferenceOracleWithConvectionAndAnisotropy) {
    const Mat2 A{{1.3, 0.2}, {0.2, 0.7}};
    const Vec2 B(0.4, -0.25);
    const double lambda = 0.8;
    const double fd = finite_difference_centre(A, B, lambda, 256);
    const auto s = solve_homogenized(plain_model(A, B, lambda), build_macro_mesh(7));
    EXPECT_NEAR(s.value(Vec2(0.5, 0.5)), fd, 1e-3 * fd);
}

TEST(MacroSolve, NonsymmetricDiffusionOnlyEntersThroughSymmetricPart) {
    const Mat2 sym{{1.0, 0.0}, {0.0, 1.0}};
    const Mat2 skew{{0.0, 0.4}, {-0.4, 0.0}};
    const auto a = solve_homogenized(plain_model(sym, Vec2::Zero(), 1.0), build_macro_mesh(5));
    const auto b = solve_homogenized(plain_model(sym + skew, Vec2::Zero(), 1.0), build_macro_mesh(5));
    EXPECT_LE((a.u.values - b.u.values).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(MacroSolve, ZeroSourceGivesZero) {
    const auto s = solve_homogenized(plain_model(Mat2::Identity(), Vec2(0.3, 0.1), 1.0, SourceField{}),
                                     build_macro_mesh(4));
    EXPECT_EQ(s.u.values.lpNorm<Eigen::Infinity>(), 0.0);
}

TEST(MacroSolve, SquareSymmetry) {
    const auto s = solve_homogenized(plain_model(Mat2::Identity(), Vec2::Zero(), 1.0), build_macro_mesh(5));
    for (const Vec2& x : {Vec2(0.2, 0.3), Vec2(0.71, 0.4), Vec2(0.125, 0.875)}) {
        EXPECT_NEAR(s.value(x), s.value(Vec2(x[1], x[0])), 1e-12);
        EXPECT_NEAR(s.value(x), s.value(Vec2(1.0 - x[0], x[1])), 1e-12);
    }
}

TEST(MacroSolve, MaximumPrinciple) {
    const double lambda = 0.7;
    const auto s = solve_homogenized(plain_model(Mat2::Identity(), Vec2(0.5, 0.2), lambda), build_macro_mesh(5));
    EXPECT_FALSE(s.peclet_warning);
    EXPECT_GE(s.u.values.minCoeff(), -1e-12);
    EXPECT_LE(s.u.values.maxCoeff(), 1.0 / lambda);
}

TEST(MacroSolve, PecletWarning) {
    const auto s = solve_homogenized(plain_model(Mat2::Identity(), Vec2(200.0, 0.0), 1.0), build_macro_mesh(3));
    EXPECT_NEAR(s.peclet, 200.0 * s.mesh->h_max / 2.0, 1e-12);
    EXPECT_TRUE(s.peclet_warning);
}

TEST(MacroSolve, RejectsIndefiniteDiffusion) {
    EXPECT_THROW(solve_homogenized(plain_model(Mat2{{1.0, 0.0}, {0.0, -0.1}}, Vec2::Zero(), 1.0),
                                   build_macro_mesh(3)),
                 Error);
}

TEST(Reconstruction, ProvenanceMismatch) {
    auto cells = cell_solutions(0.25, 4, MatrixField{}, {});
    auto other = cell_solutions(0.25, 5, MatrixField{}, {});
    CoefficientSet coeffs;
    HomogenizedModel model = build_model(*cells, coeffs);
    auto macro = std::make_shared<const MacroSolution>(solve_homogenized(model, build_macro_mesh(4)));
    EXPECT_NO_THROW(reconstruct_u1(macro, cells));
    try {
        reconstruct_u1(macro, other);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ProvenanceMismatch);
    }
}

TEST(Reconstruction, CombineIsLinearAndPeriodic) {
    SurfaceResistivity alpha;
    alpha.fourier = {{0.4, 0.1}};
    auto cells = cell_solutions(0.25, 4, MatrixField{}, alpha);
    CoefficientSet coeffs;
    coeffs.alpha = alpha;
    auto macro = std::make_shared<const MacroSolution>(solve_homogenized(build_model(*cells, coeffs), build_macro_mesh(4)));
    const CorrectorEvaluator u1 = reconstruct_u1(macro, cells);

    const CellSample s = u1.sample(Vec2(0.1, 0.2));
    const Vec2 g1(0.3, -0.7), g2(1.1, 0.4);
    EXPECT_NEAR(CorrectorEvaluator::combine(s, 2.0 + 0.5, g1 + g2),
                CorrectorEvaluator::combine(s, 2.0, g1) + CorrectorEvaluator::combine(s, 0.5, g2), 1e-14);
    EXPECT_NEAR(CorrectorEvaluator::combine(s, 1.0, Vec2::Zero()), s.gamma, 0.0);
    EXPECT_NEAR(CorrectorEvaluator::combine(s, 0.0, Vec2(0, 1)), s.zeta[1], 0.0);

    const Vec2 x(0.3, 0.6), y(0.1, 0.2);
    EXPECT_NEAR(u1.value(x, y), u1.value(x, y + Vec2(1.0, 0.0)), 1e-12);
    EXPECT_NEAR(u1.value(x, y), u1.value(x, y + Vec2(-2.0, 3.0)), 1e-12);
    EXPECT_NEAR(u1.value(x, y), CorrectorEvaluator::combine(s, macro->value(x), macro->gradient(x)), 1e-14);
}

TEST(Reconstruction, CorrectedFieldWithoutHolesIsMacroSolution) {
    auto cells = cell_solutions(0.0, 3, MatrixField{}, {});
    auto macro = std::make_shared<const MacroSolution>(solve_homogenized(build_model(*cells, CoefficientSet{}), build_macro_mesh(4)));
    const CorrectedField field = corrected_field(macro, cells, 0.25);
    for (const Vec2& x : {Vec2(0.3, 0.4), Vec2(0.77, 0.12)}) {
        EXPECT_NEAR(field.value(x), macro->value(x), 1e-12);
        EXPECT_LE((field.gradient(x) - macro->gradient(x)).norm(), 1e-12);
    }
}

TEST(Reconstruction, SamplesCsv) {
    auto cells = cell_solutions(0.25, 4, MatrixField{}, {});
    auto macro = std::make_shared<const MacroSolution>(solve_homogenized(build_model(*cells, CoefficientSet{}), build_macro_mesh(4)));
    const CorrectedField field = corrected_field(macro, cells, 0.5);
    const std::vector<Vec2> pts{Vec2(0.05, 0.05), Vec2(0.9, 0.1)};
    std::ostringstream out;
    write_samples_csv(field, pts, out);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x1,x2,value,grad1,grad2");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2);
}
