/// @file acceptance.cpp
/// @brief End-to-end acceptance run: one PASS/FAIL line per criterion.

#include "perfhom/errors.hpp"
#include "perfhom/study.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

using namespace perfhom;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    fmt::print("[{}] criterion {:2d}: {}\n", o.pass ? "PASS" : "FAIL", id, title);
    if (!o.detail.empty()) fmt::print("      {}\n", o.detail);
    std::fflush(stdout);
}

std::shared_ptr<const TriMesh> cell_mesh(double r, int level) {
    CellGeometry g;
    g.hole_radius = r;
    g.refinement = level;
    return std::make_shared<const TriMesh>(build_cell_mesh(g));
}

SurfaceResistivity resistivity(std::vector<std::array<double, 2>> modes) {
    SurfaceResistivity a;
    a.fourier = std::move(modes);
    return a;
}

struct Cell {
    std::shared_ptr<const TriMesh> mesh;
    CoefficientSet coefficients;
    CellSolutionSet cells;
    HomogenizedModel model;
};

Cell homogenize(double r, int level, const MatrixField& A, const SurfaceResistivity& alpha) {
    Cell c;
    c.mesh = cell_mesh(r, level);
    c.coefficients.A = A;
    c.coefficients.alpha = alpha;
    if (c.mesh->has_tag(EdgeTag::Sigma) && !alpha.is_zero())
        c.coefficients.alpha = discrete_zero_mean_correction(alpha, *c.mesh);
    c.cells = solve_cell_problems(c.mesh, A, c.coefficients.alpha);
    c.model = build_model(c.cells, c.coefficients);
    return c;
}

const MatrixField kNonsymmetricTrig =
    MatrixField::trig(Mat2{{1.0, 0.5}, {0.0, 1.0}}, Mat2{{0.0, 0.3}, {0.0, 0.0}}, {1, 0});

double gap(const Vec2& a, const Vec2& b) { return (a - b).norm() / std::max(a.norm(), b.norm()); }
double gap(const Mat2& a, const Mat2& b) { return (a - b).norm() / std::max(a.norm(), b.norm()); }

double lambda_max(const Mat2& a) { return Eigen::SelfAdjointEigenSolver<Mat2>(0.5 * (a + a.transpose())).eigenvalues()[1]; }

// Second-order finite differences for -Laplace u + u = 1, u = 0 on the boundary.
double fd_centre(int n) {
    const double h = 1.0 / n;
    const int m = n - 1;
    auto id = [m](int i, int j) { return (j - 1) * m + (i - 1); };
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 1; j < n; ++j)
        for (int i = 1; i < n; ++i) {
            trip.emplace_back(id(i, j), id(i, j), 4.0 / (h * h) + 1.0);
            if (i > 1) trip.emplace_back(id(i, j), id(i - 1, j), -1.0 / (h * h));
            if (i < m) trip.emplace_back(id(i, j), id(i + 1, j), -1.0 / (h * h));
            if (j > 1) trip.emplace_back(id(i, j), id(i, j - 1), -1.0 / (h * h));
            if (j < m) trip.emplace_back(id(i, j), id(i, j + 1), -1.0 / (h * h));
        }
    Eigen::SparseMatrix<double> k(m * m, m * m);
    k.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(k);
    const Eigen::VectorXd u = lu.solve(Eigen::VectorXd::Ones(m * m));
    return u[id(n / 2, n / 2)];
}

// r = 0.25, A = I, sign-changing zero-mean alpha well inside the coercivity gate.
StudyConfig stability_config(std::vector<int> tiles) {
    StudyConfig c;
    c.cell.hole_radius = 0.25;
    c.cell.refinement = 4;
    c.coefficients.alpha = resistivity({{0.2, 0.0}, {0.0, 0.1}});
    c.tiles = std::move(tiles);
    c.macro_refinement = 6;
    c.floor_check = false;
    return c;
}

}  // namespace

int main() {
    fmt::print("perfhom acceptance run\n");

    report(1, "identity collapse (A=I, r=0, alpha=0, mu=1)", [] {
        const auto t0 = Clock::now();
        const Cell c = homogenize(0.0, 4, MatrixField{}, {});
        const double t = seconds_since(t0);
        const double ea = (c.model.A_hom - Mat2::Identity()).norm();
        const double eb = c.model.B.norm();
        const double el = std::abs(c.model.lambda - 1.0), em = std::abs(c.model.mu_tilde - 1.0);
        return Outcome{ea <= 1e-10 && eb <= 1e-10 && el <= 1e-10 && em <= 1e-10 && t < 5.0,
                       fmt::format("|A_hom-I|={:.2e} |B|={:.2e} |lambda-1|={:.2e} |mu~-1|={:.2e} time={:.2f}s", ea, eb,
                                   el, em, t)};
    });

    report(2, "Galerkin-exact identities (nonsymmetric TRIG A, r=0.25, L=4)", [] {
        const Cell c = homogenize(0.25, 4, kNonsymmetricTrig, resistivity({{1.0, 0.0}, {0.0, 0.5}}));
        const auto& m = c.model;
        const double ga = gap(m.a_forms.definition, m.a_forms.energy);
        const double gb = std::max(gap(m.b_forms.direct, m.b_forms.substituted), gap(m.b_forms.direct, m.b_forms.antisymmetric));
        const double gl = relative_gap(m.lambda_forms.surface, m.lambda_forms.energy);
        return Outcome{ga <= 1e-9 && gb <= 1e-9 && gl <= 1e-9 && m.lambda <= m.mu_tilde,
                       fmt::format("A forms {:.2e}, B forms {:.2e}, lambda forms {:.2e}, lambda={:.6f} <= mu~={:.6f}",
                                   ga, gb, gl, m.lambda, m.mu_tilde)};
    });

    report(3, "symmetric A gives B = 0", [] {
        const std::vector<MatrixField> cases{
            MatrixField::constant(Mat2{{3.0, 0.0}, {0.0, 1.0}}),
            MatrixField::constant(Mat2{{2.0, 0.6}, {0.6, 1.0}}),
            MatrixField::trig(Mat2{{1.5, 0.2}, {0.2, 1.0}}, Mat2{{0.4, 0.3}, {0.3, 0.2}}, {1, 2}),
        };
        bool ok = true;
        std::string detail;
        for (const auto& A : cases) {
            const double b = homogenize(0.25, 4, A, resistivity({{1.0, 0.0}, {0.0, 0.5}})).model.B.norm();
            ok = ok && b <= 1e-8 * std::max(1.0, A.c.norm());
            detail += fmt::format("|B|={:.2e} ", b);
        }
        return Outcome{ok, detail};
    });

    report(4, "A_hom symmetric, positive and below the Voigt bound", [] {
        const MatrixField A = MatrixField::trig(Mat2{{2.0, 0.4}, {0.4, 1.0}}, Mat2{{0.5, 0.1}, {0.1, 0.2}}, {1, 1});
        const Cell c = homogenize(0.25, 4, A, resistivity({{0.3, 0.0}}));
        const Mat2& h = c.model.A_hom;
        const double asym = std::abs(h(0, 1) - h(1, 0)) / h.norm();
        const auto ev = Eigen::SelfAdjointEigenSolver<Mat2>(0.5 * (h + h.transpose())).eigenvalues();
        const double voigt = integrate(*c.mesh, [&](const EvalPoint& p) { return lambda_max(A(p.y)); });
        const double a_star = homogenize(0.25, 4, MatrixField{}, {}).model.A_hom(0, 0);
        const double cap = 1.0 - std::numbers::pi / 16.0 + 0.02;
        return Outcome{asym <= 1e-9 && ev[0] > 0.0 && ev[1] <= voigt + 1e-9 && a_star <= cap,
                       fmt::format("asym={:.2e} eig=({:.6f}, {:.6f}) voigt={:.6f} a*={:.6f} <= {:.6f}", asym, ev[0],
                                   ev[1], voigt, a_star, cap)};
    });

    report(5, "compatibility gate rejects a mean-shifted alpha", [] {
        const auto cell = cell_mesh(0.25, 4);
        SurfaceResistivity shifted = discrete_zero_mean_correction(resistivity({{1.0, 0.0}}), *cell);
        shifted.discrete_mean_shift -= 0.1;  // constant offset +0.1
        auto kind_of = [](const std::function<void()>& f) -> std::string {
            try {
                f();
            } catch (const Error& e) {
                return std::string(to_string(e.kind()));
            }
            return "no error";
        };
        const std::string g = kind_of([&] { solve_gamma(cell, MatrixField{}, shifted); });
        const std::string t = kind_of([&] { solve_theta(cell, shifted); });
        return Outcome{g == "Incompatible" && t == "Incompatible", "solve_gamma: " + g + ", solve_theta: " + t};
    });

    report(6, "scaled trace inequality on fine meshes (delta=1)", [] {
        const auto cell = cell_mesh(0.25, 4);
        const double cs = estimate_trace_constant(*cell, 1.0).value;
        std::mt19937_64 rng(20240531);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        int violations = 0;
        double worst = 0.0;
        for (int n : {2, 4, 8}) {
            const FineProblem p = make_fine_problem(cell, CoefficientSet{}, n);
            const TriMesh& m = *p.mesh;
            const SparseMatrix ms = assemble_bilinear(m, SurfaceReaction{[](const EvalPoint&) { return 1.0; }, EdgeTag::Sigma});
            const SparseMatrix mm = assemble_bilinear(m, VolumeReaction{[](const EvalPoint&) { return 1.0; }});
            const SparseMatrix kk = assemble_bilinear(m, Diffusion{[](const EvalPoint&) -> Mat2 { return Mat2::Identity(); }});
            for (int trial = 0; trial < 100; ++trial) {
                Eigen::VectorXd v(m.vertices.size());
                for (int i = 0; i < v.size(); ++i) v[i] = uni(rng);
                if (trial % 2) v.array() += 2.0;
                const double lhs = v.dot(ms * v);
                const double rhs = cs * (v.dot(mm * v) / p.eps + p.eps * v.dot(kk * v));
                worst = std::max(worst, lhs / rhs);
                if (lhs > (1.0 + 1e-8) * rhs) ++violations;
            }
        }
        return Outcome{violations == 0,
                       fmt::format("C_s={:.6f}, violations={}/300, max lhs/rhs={:.4f}", cs, violations, worst)};
    });

    report(7, "coercivity gate and a priori stability", [] {
        const StudyConfig cfg = stability_config({2, 4, 8, 16});
        const CellStage stage = run_cell_stage(cfg);
        const CoercivityCheck gate = coercivity_gate(*stage.cell, stage.coefficients);
        std::vector<AprioriReport> rows;
        for (int n : cfg.tiles) {
            const FineProblem p = make_fine_problem(stage.cell, stage.coefficients, n);
            rows.push_back(apriori_report(solve_robin_fine(p, gate, cfg.tol), p, gate));
        }
        auto spread = [&](auto field) {
            double worst = 1.0;
            for (const auto& r : rows) {
                const double q = field(r) / field(rows.front());
                worst = std::max({worst, q, 1.0 / q});
            }
            return worst;
        };
        const double sg = spread([](const AprioriReport& r) { return r.grad_norm; });
        const double sl = spread([](const AprioriReport& r) { return r.l2_norm; });
        const double ss = spread([](const AprioriReport& r) { return r.sigma_norm; });
        const double sw = spread([](const AprioriReport& r) { return std::sqrt(r.eps) * r.sigma_norm; });

        const fs::path dir = fs::temp_directory_path() / "perfhom_acceptance_gate";
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::ofstream(dir / "huge.json") << R"({"cell": {"radius": 0.25, "refinement": 4},
                                                 "alpha": {"fourier": [[50.0, 0.0]]}})";
        const int status = std::system(fmt::format("{} check -c {} -o {} > /dev/null 2>&1", PERFHOM_CLI,
                                                   (dir / "huge.json").string(), dir.string())
                                           .c_str());
        const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;

        std::string sigma_row;
        for (const auto& r : rows) sigma_row += fmt::format(" {:.4f}", r.sigma_norm);
        return Outcome{gate.ok && sg < 2.0 && sl < 2.0 && ss < 2.0 && code == 2,
                       fmt::format("gate ok={} c0={:.3f}; max ratio vs eps=1/2: grad {:.3f}, L2 {:.3f}, Sigma {:.3f} "
                                   "(Sigma norms{}; sqrt(eps)-weighted {:.3f}); failing config exit code {}",
                                   gate.ok, gate.c0, sg, sl, ss, sigma_row, sw, code)};
    });

    report(8, "two-scale convergence study (eps = 1/4, 1/8, 1/16)", [] {
        const auto t0 = Clock::now();
        const ConvergenceReport r = run_convergence_study(stability_config({4, 8, 16}));
        const double t = seconds_since(t0);
        bool ok = r.complete() && t <= 300.0;
        std::string detail;
        for (std::size_t i = 0; i < r.rows.size(); ++i) {
            const auto& row = r.rows[i];
            detail += fmt::format("eps=1/{} e0={:.3e} s1={:.3e} s2={:.3e}; ", row.tiles, row.e0, row.s1, row.s2);
            if (i == 0) continue;
            const auto& prev = r.rows[i - 1];
            ok = ok && row.e0 / prev.e0 <= 0.7 && row.s1 < prev.s1 && row.s2 < prev.s2;
        }
        return Outcome{ok, detail + fmt::format("time={:.1f}s", t)};
    });

    report(9, "derived-oracle regressions", [] {
        std::vector<double> a;
        for (int level : {4, 5, 6}) a.push_back(homogenize(0.25, level, MatrixField{}, {}).model.A_hom(0, 0));
        const double r45 = (4.0 * a[1] - a[0]) / 3.0, r56 = (4.0 * a[2] - a[1]) / 3.0;
        const bool a_ok = std::abs(r45 - r56) <= 0.02 * r56;

        HomogenizedModel plain;
        plain.F = SourceField::constant(1.0);
        const double macro = solve_homogenized(plain, build_macro_mesh(6)).value(Vec2(0.5, 0.5));
        const double fd = fd_centre(256);
        const bool c_ok = std::abs(macro - fd) <= 0.01 * fd;

        auto b_csv = [] {
            const Vec2 b = homogenize(0.25, 4, kNonsymmetricTrig, resistivity({{1.0, 0.0}})).model.B;
            return std::pair{b, fmt::format("b1,b2\n{:.17g},{:.17g}\n", b[0], b[1])};
        };
        const auto [b1, csv1] = b_csv();
        const auto [b2, csv2] = b_csv();
        const Vec2 frozen(0.0106228312153627, 0.106347622953372);
        const bool b_ok = csv1 == csv2 && (b1 - frozen).lpNorm<Eigen::Infinity>() <= 1e-6;
        return Outcome{a_ok && c_ok && b_ok,
                       fmt::format("a*: L4..6 = {:.6f} {:.6f} {:.6f}, Richardson {:.6f}/{:.6f}; macro centre {:.6f} vs "
                                   "FD {:.6f}; B = ({:.15g}, {:.15g}) identical={}",
                                   a[0], a[1], a[2], r45, r56, macro, fd, b1[0], b1[1], csv1 == csv2)};
    });

    report(10, "constant nonsymmetric A probe", [] {
        const Cell c = homogenize(0.25, 4, MatrixField::constant(Mat2{{1.0, 0.5}, {-0.5, 1.0}}), resistivity({{1.0, 0.0}}));
        const double b = c.model.B.norm();
        return Outcome{std::isfinite(b), fmt::format("|B| = {:.6e}, B = ({:.6e}, {:.6e})", b, c.model.B[0], c.model.B[1])};
    });

    fmt::print("{} criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
