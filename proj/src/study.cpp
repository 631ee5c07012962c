#include "perfhom/study.hpp"

#include "perfhom/errors.hpp"
#include "perfhom/quadrature.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

namespace perfhom {

namespace {

using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

void require_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad_config(where + " must be an object");
    for (const auto& item : j.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; }))
            bad_config("unknown key '" + item.key() + "' in " + where);
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) bad_config(where + " must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) bad_config(where + " must be an integer");
    return j.get<int>();
}

Vec2 point(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) bad_config(where + " must be a 2-vector");
    return {number(j[0], where), number(j[1], where)};
}

std::array<int, 2> wave(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) bad_config(where + " must be an integer 2-vector");
    return {integer(j[0], where), integer(j[1], where)};
}

Mat2 matrix(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2) bad_config(where + " must be a 2x2 array");
    Mat2 m;
    for (int r = 0; r < 2; ++r) {
        const Vec2 row = point(j[static_cast<std::size_t>(r)], where);
        m.row(r) = row.transpose();
    }
    return m;
}

FieldKind kind(const json& j, const std::string& where) {
    const std::string k = j.value("kind", std::string("constant"));
    if (k == "constant") return FieldKind::Constant;
    if (k == "trig") return FieldKind::Trig;
    bad_config(where + ".kind must be 'constant' or 'trig'");
}

MatrixField parse_matrix_field(const json& j) {
    require_keys(j, "A", {"kind", "c", "d", "wave"});
    if (!j.contains("c")) bad_config("A.c is required");
    if (kind(j, "A") == FieldKind::Constant) {
        if (j.contains("d") || j.contains("wave")) bad_config("constant A takes only 'c'");
        return MatrixField::constant(matrix(j["c"], "A.c"));
    }
    if (!j.contains("d") || !j.contains("wave")) bad_config("trig A needs 'c', 'd' and 'wave'");
    return MatrixField::trig(matrix(j["c"], "A.c"), matrix(j["d"], "A.d"), wave(j["wave"], "A.wave"));
}

ScalarVolumeField parse_mu(const json& j) {
    if (j.is_number()) return ScalarVolumeField::constant(j.get<double>());
    require_keys(j, "mu", {"kind", "base", "amplitude", "wave"});
    if (!j.contains("base")) bad_config("mu.base is required");
    const double base = number(j["base"], "mu.base");
    if (kind(j, "mu") == FieldKind::Constant) return ScalarVolumeField::constant(base);
    if (!j.contains("amplitude") || !j.contains("wave")) bad_config("trig mu needs 'amplitude' and 'wave'");
    return ScalarVolumeField::trig(base, number(j["amplitude"], "mu.amplitude"), wave(j["wave"], "mu.wave"));
}

SurfaceResistivity parse_alpha(const json& j) {
    require_keys(j, "alpha", {"fourier"});
    SurfaceResistivity a;
    if (j.contains("fourier")) {
        if (!j["fourier"].is_array()) bad_config("alpha.fourier must be an array of [a_k, b_k]");
        for (const auto& ab : j["fourier"]) {
            const Vec2 v = point(ab, "alpha.fourier entry");
            a.fourier.push_back({v[0], v[1]});
        }
    }
    a.validate();
    return a;
}

SourceFactor parse_factor(const json& j, const std::string& where) {
    const auto w = wave(j, where);
    if (w[0] < 1 || w[0] > 2 || w[1] < 0) bad_config(where + " must be [axis in {1,2}, wave >= 0]");
    return {w[0] - 1, w[1]};
}

SourceField parse_source(const json& j, const std::string& name) {
    if (j.is_number()) return SourceField::constant(j.get<double>());
    require_keys(j, name, {"terms"});
    SourceField f;
    if (!j.contains("terms") || !j["terms"].is_array()) bad_config(name + ".terms must be an array");
    for (const auto& t : j["terms"]) {
        require_keys(t, name + " term", {"c", "x", "y"});
        SourceTerm term;
        term.coefficient = t.contains("c") ? number(t["c"], name + ".c") : 1.0;
        if (t.contains("x")) term.macro = parse_factor(t["x"], name + ".x");
        if (t.contains("y")) term.micro = parse_factor(t["y"], name + ".y");
        f.terms.push_back(term);
    }
    f.validate();
    return f;
}

double phi(const Vec2& x) { return std::sin(std::numbers::pi * x.x()) * std::sin(std::numbers::pi * x.y()); }

Vec2 bary_point(const TriMesh& mesh, int t, const std::array<double, 3>& b) {
    const auto& tri = mesh.triangles[static_cast<std::size_t>(t)];
    return b[0] * mesh.vertices[tri[0]] + b[1] * mesh.vertices[tri[1]] + b[2] * mesh.vertices[tri[2]];
}

struct MacroTargets {
    double s1 = 0.0;  ///< |Sigma| int u phi
    double s2 = 0.0;  ///< int phi int_Sigma u1 alpha
};

MacroTargets macro_targets(const CellStage& stage, const MacroSolution& macro) {
    MacroTargets out;
    const TriMesh& mesh = *macro.mesh;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const double area = triangle_area(mesh, t);
        const Vec2 g = macro.u.gradient(t);
        for (const auto& b : quad::kTrianglePoints) {
            const Vec2 x = bary_point(mesh, t, b);
            const double w = quad::kTriangleWeight * area * phi(x);
            const double u = macro.u.at(t, b);
            out.s1 += w * u;
            out.s2 += w * (g[0] * stage.alpha_zeta[0] + g[1] * stage.alpha_zeta[1] + u * stage.alpha_gamma);
        }
    }
    out.s1 *= stage.sigma_measure;
    return out;
}

ConvergenceRow evaluate_epsilon(const CellStage& stage, const CoercivityCheck& gate,
                                const std::shared_ptr<const MacroSolution>& macro, const CorrectorEvaluator& u1,
                                const MacroTargets& targets, int n, bool force) {
    ConvergenceRow row;
    row.tiles = n;
    row.eps = 1.0 / n;
    try {
        const FineProblem p = make_fine_problem(stage.cell, stage.coefficients, n);
        row.h = p.mesh->h_max;
        const FEFunction u = solve_robin_fine(p, gate, stage.config.tol, force);
        row.apriori = apriori_report(u, p, gate);

        const TriMesh& mesh = *p.mesh;
        double e0 = 0.0, e1 = 0.0;
        for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
            const double area = triangle_area(mesh, t);
            const Vec2 grad_fine = u.gradient(t);
            const int ct = mesh.cell_triangle[static_cast<std::size_t>(t)];
            for (const auto& b : quad::kTrianglePoints) {
                const Vec2 x = bary_point(mesh, t, b);
                const Location loc = macro->locator->locate_nearest(x);
                const double um = macro->u.at(loc.triangle, loc.bary);
                const Vec2 gm = macro->u.gradient(loc.triangle);
                const Vec2 target = gm + CorrectorEvaluator::combine_grad(u1.sample(ct, b), um, gm);
                const double w = quad::kTriangleWeight * area;
                e0 += w * std::pow(u.at(t, b) - um, 2);
                e1 += w * (grad_fine - target).squaredNorm();
            }
        }
        row.e0 = std::sqrt(e0);
        row.e1 = std::sqrt(e1);

        if (mesh.has_tag(EdgeTag::Sigma)) {
            const SurfaceResistivity& alpha = stage.coefficients.alpha;
            double sum1 = 0.0, sum2 = 0.0;
            for (const auto& e : mesh.edges(EdgeTag::Sigma)) {
                const Vec2& a = mesh.vertices[e[0]];
                const Vec2& c = mesh.vertices[e[1]];
                const double len = (c - a).norm();
                for (double s : quad::kEdgePoints) {
                    const Vec2 x = a + s * (c - a);
                    const double w = quad::kEdgeWeight * len * phi(x) *
                                     ((1.0 - s) * u.values[e[0]] + s * u.values[e[1]]);
                    sum1 += w;
                    sum2 += w * alpha.at(mesh.micro_on_edge(x));
                }
            }
            row.s1 = std::abs(row.eps * sum1 - targets.s1);
            row.s2 = std::abs(sum2 - targets.s2);
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        row.e0 = row.e1 = row.s1 = row.s2 = kNaN;
    }
    return row;
}

std::string csv_number(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : "nan"; }

std::string csv_optional(const std::optional<double>& v) { return v ? csv_number(*v) : ""; }

json gate_json(const CoercivityCheck& g) {
    return {{"ok", g.ok},           {"c0", g.c0},
            {"m", g.m},             {"mu0", g.mu0},
            {"trace_constant", g.trace_constant}, {"alpha_max", g.alpha_max}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write " + path.string());
    out << text;
}

std::string dump_function(const FEFunction& f) {
    std::ostringstream s;
    f.write_csv(s);
    return s.str();
}

std::string dump_mesh(const TriMesh& m) {
    std::ostringstream s;
    write_mesh_text(m, s);
    return s.str();
}

std::string dump_vtk(const TriMesh& m) {
    std::ostringstream s;
    write_vtk(m, s);
    return s.str();
}

struct Prepared {
    std::shared_ptr<const TriMesh> cell;
    CoefficientSet coefficients;
};

Prepared prepare(const StudyConfig& cfg) {
    cfg.cell.validate();
    validate_ellipticity(cfg.coefficients.A);
    validate_mu(cfg.coefficients.mu);
    cfg.coefficients.alpha.validate();
    cfg.coefficients.f.validate();
    cfg.coefficients.g.validate();
    Prepared p;
    p.cell = std::make_shared<const TriMesh>(build_cell_mesh(cfg.cell));
    p.coefficients = cfg.coefficients;
    p.coefficients.alpha.center = cfg.cell.hole_center;
    if (p.cell->has_tag(EdgeTag::Sigma))
        p.coefficients.alpha = discrete_zero_mean_correction(p.coefficients.alpha, *p.cell);
    return p;
}

std::shared_ptr<const MacroSolution> macro_solution(const CellStage& stage) {
    return std::make_shared<const MacroSolution>(
        solve_homogenized(stage.model, build_macro_mesh(stage.config.macro_refinement), stage.config.tol));
}

void require_gate(const CoercivityCheck& gate, bool force, std::ostream& log) {
    if (gate.ok) return;
    const std::string msg = fmt::format("coercivity gate failed: sqrt(mu0 m) = {:.6g} <= C_s |alpha|_inf = {:.6g}",
                                        std::sqrt(gate.mu0 * gate.m), gate.trace_constant * gate.alpha_max);
    if (!force) throw Error(ErrorKind::CoercivityFailed, msg);
    log << "warning: " << msg << " (continuing because of --force)\n";
}

}  // namespace

StudyConfig parse_config(const json& j) {
    require_keys(j, "config",
                 {"cell", "A", "mu", "alpha", "f", "g", "epsilons", "macro_refinement", "tol", "floor_check"});
    StudyConfig cfg;
    if (j.contains("cell")) {
        const json& c = j["cell"];
        require_keys(c, "cell", {"center", "radius", "refinement"});
        if (c.contains("center")) cfg.cell.hole_center = point(c["center"], "cell.center");
        if (c.contains("radius")) cfg.cell.hole_radius = number(c["radius"], "cell.radius");
        if (c.contains("refinement")) cfg.cell.refinement = integer(c["refinement"], "cell.refinement");
    }
    if (j.contains("A")) cfg.coefficients.A = parse_matrix_field(j["A"]);
    if (j.contains("mu")) cfg.coefficients.mu = parse_mu(j["mu"]);
    if (j.contains("alpha")) cfg.coefficients.alpha = parse_alpha(j["alpha"]);
    if (j.contains("f")) cfg.coefficients.f = parse_source(j["f"], "f");
    if (j.contains("g")) cfg.coefficients.g = parse_source(j["g"], "g");
    if (j.contains("epsilons")) {
        if (!j["epsilons"].is_array() || j["epsilons"].empty()) bad_config("epsilons must be a non-empty array");
        cfg.tiles.clear();
        for (const auto& n : j["epsilons"]) cfg.tiles.push_back(integer(n, "epsilons entry"));
    }
    if (j.contains("macro_refinement")) cfg.macro_refinement = integer(j["macro_refinement"], "macro_refinement");
    if (j.contains("tol")) cfg.tol = number(j["tol"], "tol");
    if (j.contains("floor_check")) {
        if (!j["floor_check"].is_boolean()) bad_config("floor_check must be a boolean");
        cfg.floor_check = j["floor_check"].get<bool>();
    }

    std::set<int> seen;
    for (int n : cfg.tiles) {
        if (n < 2) bad_config("each epsilon is given as N = 1/eps with N >= 2");
        if (!seen.insert(n).second) bad_config("epsilon 1/" + std::to_string(n) + " listed twice");
    }
    std::sort(cfg.tiles.begin(), cfg.tiles.end());
    if (cfg.macro_refinement < 2 || cfg.macro_refinement > 10) bad_config("macro_refinement must be in [2, 10]");
    if (!(cfg.tol > 0.0 && cfg.tol < 1e-2)) bad_config("tol must be in (0, 1e-2)");
    cfg.cell.validate();
    return cfg;
}

StudyConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) bad_config("cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        bad_config(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

CellStage run_cell_stage(const StudyConfig& cfg) {
    const Prepared p = prepare(cfg);
    CellStage s;
    s.config = cfg;
    s.cell = p.cell;
    s.coefficients = p.coefficients;
    s.cells = std::make_shared<const CellSolutionSet>(
        solve_cell_problems(s.cell, s.coefficients.A, s.coefficients.alpha, cfg.tol));
    s.model = build_model(*s.cells, s.coefficients);
    if (s.cell->has_tag(EdgeTag::Sigma)) {
        for (const auto& e : s.cell->edges(EdgeTag::Sigma))
            s.sigma_measure += (s.cell->vertices[e[1]] - s.cell->vertices[e[0]]).norm();
        if (!s.coefficients.alpha.is_zero()) {
            const Eigen::VectorXd load =
                assemble_load(*s.cell, micro_coefficient(s.coefficients.alpha), EdgeTag::Sigma);
            s.alpha_zeta = {load.dot(s.cells->zeta1.values), load.dot(s.cells->zeta2.values)};
            s.alpha_gamma = load.dot(s.cells->gamma.values);
        }
    }
    return s;
}

CoercivityCheck coercivity_gate(const TriMesh& cell, const CoefficientSet& coefficients) {
    const EllipticityBounds a = validate_ellipticity(coefficients.A);
    const double mu0 = validate_mu(coefficients.mu);
    double cs = 0.0;
    double alpha_max = 0.0;
    if (cell.has_tag(EdgeTag::Sigma)) {
        cs = estimate_trace_constant(cell, std::sqrt(a.m / mu0), 1e-8).value;
        alpha_max = coefficients.alpha.sup_norm();
    }
    return check_coercivity(a.m, mu0, cs, alpha_max);
}

bool ConvergenceReport::complete() const {
    return std::all_of(rows.begin(), rows.end(), [](const ConvergenceRow& r) { return r.error.empty(); });
}

ConvergenceReport run_convergence_study(const StudyConfig& cfg, bool force) {
    const CellStage stage = run_cell_stage(cfg);
    ConvergenceReport report;
    report.model = stage.model;
    report.gate = coercivity_gate(*stage.cell, stage.coefficients);
    std::ostringstream sink;
    require_gate(report.gate, force, sink);

    const auto macro = macro_solution(stage);
    report.peclet = macro->peclet;
    const CorrectorEvaluator u1 = reconstruct_u1(macro, stage.cells);
    const MacroTargets targets = macro_targets(stage, *macro);

    std::vector<std::future<ConvergenceRow>> jobs;
    for (auto it = cfg.tiles.begin(); it != cfg.tiles.end(); ++it) {
        const int n = *it;
        jobs.push_back(std::async(std::launch::async, [&, n] {
            return evaluate_epsilon(stage, report.gate, macro, u1, targets, n, force);
        }));
    }
    for (auto& j : jobs) report.rows.push_back(j.get());

    for (std::size_t i = 1; i < report.rows.size(); ++i) {
        const auto& prev = report.rows[i - 1];
        auto& row = report.rows[i];
        if (!prev.error.empty() || !row.error.empty()) continue;
        const double scale = std::log2(static_cast<double>(row.tiles) / prev.tiles);
        if (prev.e0 > 0.0 && row.e0 > 0.0) row.rate0 = std::log2(prev.e0 / row.e0) / scale;
        if (prev.e1 > 0.0 && row.e1 > 0.0) row.rate1 = std::log2(prev.e1 / row.e1) / scale;
    }

    const ConvergenceRow& finest = report.rows.back();
    StudyConfig refined = cfg;
    refined.cell.refinement += 1;
    if (cfg.floor_check && finest.error.empty() && refined.cell.refinement <= 12) {
        const CellStage fine_stage = run_cell_stage(refined);
        const auto macro2 = macro_solution(fine_stage);
        const CorrectorEvaluator u1b = reconstruct_u1(macro2, fine_stage.cells);
        const CoercivityCheck gate2 = coercivity_gate(*fine_stage.cell, fine_stage.coefficients);
        const ConvergenceRow again = evaluate_epsilon(fine_stage, gate2, macro2, u1b,
                                                      macro_targets(fine_stage, *macro2), finest.tiles, true);
        if (again.error.empty()) report.discretization_floor = std::abs(finest.e0 - again.e0);
    }
    return report;
}

std::vector<SurfaceIdentityRow> run_surface_identity_checks(const StudyConfig& cfg, bool force) {
    StudyConfig c = cfg;
    c.floor_check = false;
    const ConvergenceReport report = run_convergence_study(c, force);
    std::vector<SurfaceIdentityRow> rows;
    for (const auto& r : report.rows) rows.push_back({r.eps, r.s1, r.s2});
    return rows;
}

void write_convergence_csv(const ConvergenceReport& report, std::ostream& out) {
    out << "eps,h,e0,e1,rate0,rate1,s1,s2,grad_norm,l2_norm,sigma_norm,c0\n";
    for (const auto& r : report.rows) {
        const bool ok = r.error.empty();
        out << csv_number(r.eps) << ',' << csv_number(r.h) << ',' << csv_number(r.e0) << ',' << csv_number(r.e1)
            << ',' << csv_optional(r.rate0) << ',' << csv_optional(r.rate1) << ',' << csv_number(r.s1) << ','
            << csv_number(r.s2) << ',' << csv_number(ok ? r.apriori.grad_norm : kNaN) << ','
            << csv_number(ok ? r.apriori.l2_norm : kNaN) << ',' << csv_number(ok ? r.apriori.sigma_norm : kNaN)
            << ',' << csv_number(report.gate.c0) << '\n';
    }
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) return is_validation_error(err->kind()) ? 2 : 3;
    if (dynamic_cast<const json::exception*>(&e)) return 2;
    return 3;
}

int run_pipeline(const std::string& command, const StudyConfig& input, const PipelineOptions& options,
                 std::ostream& log) {
    StudyConfig cfg = input;
    if (options.tol) cfg.tol = *options.tol;
    const auto& dir = options.output_dir;
    std::vector<std::pair<std::string, std::string>> files;  // written after all computations

    try {
        std::filesystem::create_directories(dir);
        if (command == "mesh") {
            const Prepared p = prepare(cfg);
            const QualityReport q = mesh_quality_report(*p.cell);
            log << fmt::format("cell mesh: {} vertices, {} triangles, min angle {:.2f} deg, h_max {:.4g}\n",
                               q.vertex_count, q.triangle_count, q.min_angle_deg, q.h_max);
            files.emplace_back("mesh_cell.txt", dump_mesh(*p.cell));
            if (options.vtk) files.emplace_back("mesh_cell.vtk", dump_vtk(*p.cell));
            for (int n : cfg.tiles) {
                const TriMesh fine = tile_perforated_mesh(*p.cell, n);
                files.emplace_back(fmt::format("mesh_fine_{}.txt", n), dump_mesh(fine));
                if (options.vtk) files.emplace_back(fmt::format("mesh_fine_{}.vtk", n), dump_vtk(fine));
            }
            files.emplace_back("mesh_macro.txt", dump_mesh(*build_macro_mesh(cfg.macro_refinement)));
        } else if (command == "cell") {
            const CellStage s = run_cell_stage(cfg);
            files.emplace_back("cell_zeta1.csv", dump_function(s.cells->zeta1));
            files.emplace_back("cell_zeta2.csv", dump_function(s.cells->zeta2));
            files.emplace_back("cell_gamma.csv", dump_function(s.cells->gamma));
            files.emplace_back("cell_theta.csv", dump_function(s.cells->theta));
            const json summary = {{"residuals", s.cells->residuals},
                                  {"sigma_measure", s.sigma_measure},
                                  {"alpha_mean_shift", s.coefficients.alpha.discrete_mean_shift}};
            files.emplace_back("cell.json", summary.dump(2) + "\n");
            log << fmt::format("cell problems solved, max residual {:.3g}\n",
                               *std::max_element(s.cells->residuals.begin(), s.cells->residuals.end()));
        } else if (command == "homogenize") {
            const CellStage s = run_cell_stage(cfg);
            files.emplace_back("model.json", to_json(s.model).dump(2) + "\n");
            log << fmt::format("A_hom = [[{:.10g}, {:.10g}], [{:.10g}, {:.10g}]]\nB = ({:.10g}, {:.10g})\n"
                               "lambda = {:.10g}, mu_tilde = {:.10g}\n",
                               s.model.A_hom(0, 0), s.model.A_hom(0, 1), s.model.A_hom(1, 0), s.model.A_hom(1, 1),
                               s.model.B[0], s.model.B[1], s.model.lambda, s.model.mu_tilde);
        } else if (command == "fine") {
            const Prepared p = prepare(cfg);
            const CoercivityCheck gate = coercivity_gate(*p.cell, p.coefficients);
            require_gate(gate, options.force, log);
            std::vector<std::future<std::pair<FEFunction, AprioriReport>>> jobs;
            for (int n : cfg.tiles) {
                jobs.push_back(std::async(std::launch::async, [&, n] {
                    const FineProblem fp = make_fine_problem(p.cell, p.coefficients, n);
                    FEFunction u = solve_robin_fine(fp, gate, cfg.tol, true);
                    AprioriReport r = apriori_report(u, fp, gate);
                    return std::make_pair(std::move(u), r);
                }));
            }
            std::vector<AprioriReport> rows;
            for (std::size_t i = 0; i < jobs.size(); ++i) {
                auto [u, r] = jobs[i].get();
                files.emplace_back(fmt::format("fine_{}.csv", cfg.tiles[i]), dump_function(u));
                if (options.vtk) {
                    std::ostringstream s;
                    write_vtk(*u.mesh, s, std::span<const double>(u.values.data(), u.values.size()));
                    files.emplace_back(fmt::format("fine_{}.vtk", cfg.tiles[i]), s.str());
                }
                rows.push_back(r);
            }
            std::ostringstream csv;
            write_report_csv(rows, csv);
            files.emplace_back("fine_report.csv", csv.str());
        } else if (command == "macro") {
            const CellStage s = run_cell_stage(cfg);
            const auto macro = macro_solution(s);
            if (macro->peclet_warning)
                log << fmt::format("warning: mesh Peclet number {:.3g} >= 1\n", macro->peclet);
            files.emplace_back("model.json", to_json(s.model).dump(2) + "\n");
            files.emplace_back("macro_u.csv", dump_function(macro->u));
            const CorrectorEvaluator u1 = reconstruct_u1(macro, s.cells);
            constexpr int kSamples = 65;
            for (int n : cfg.tiles) {
                const CorrectedField field(u1, 1.0 / n);
                std::vector<Vec2> points;
                for (int j = 0; j < kSamples; ++j) {
                    for (int i = 0; i < kSamples; ++i) {
                        const Vec2 x(double(i) / (kSamples - 1), double(j) / (kSamples - 1));
                        const Vec2 y(n * x.x() - std::floor(n * x.x()), n * x.y() - std::floor(n * x.y()));
                        if (cfg.cell.has_hole() && (y - cfg.cell.hole_center).norm() < cfg.cell.hole_radius)
                            continue;
                        points.push_back(x);
                    }
                }
                std::ostringstream csv;
                write_samples_csv(field, points, csv);
                files.emplace_back(fmt::format("corrected_field_{}.csv", n), csv.str());
            }
        } else if (command == "converge") {
            const ConvergenceReport report = run_convergence_study(cfg, options.force);
            std::ostringstream csv;
            write_convergence_csv(report, csv);
            files.emplace_back("convergence.csv", csv.str());
            files.emplace_back("model.json", to_json(report.model).dump(2) + "\n");
            json errors = json::object();
            for (const auto& r : report.rows)
                if (!r.error.empty()) errors[std::to_string(r.tiles)] = r.error;
            json summary = {{"gate", gate_json(report.gate)},
                            {"peclet", report.peclet},
                            {"B_norm", report.model.B.norm()},
                            {"errors", errors}};
            summary["discretization_floor"] =
                report.discretization_floor ? json(*report.discretization_floor) : json(nullptr);
            files.emplace_back("summary.json", summary.dump(2) + "\n");
            log << csv.str();
            if (!report.complete()) {
                for (const auto& f : files) write_text(dir / f.first, f.second);
                log << "error: some eps rows failed, see summary.json\n";
                return 3;
            }
        } else if (command == "check") {
            const Prepared p = prepare(cfg);
            const CoercivityCheck gate = coercivity_gate(*p.cell, p.coefficients);
            files.emplace_back("check.json", gate_json(gate).dump(2) + "\n");
            for (const auto& f : files) write_text(dir / f.first, f.second);
            log << fmt::format("m = {:.6g}, mu0 = {:.6g}, C_s = {:.6g}, |alpha|_inf = {:.6g}, c0 = {:.6g}\n", gate.m,
                               gate.mu0, gate.trace_constant, gate.alpha_max, gate.c0);
            require_gate(gate, false, log);
            log << "coercivity gate passed\n";
            return 0;
        } else {
            throw Error(ErrorKind::InvalidConfig, "unknown command '" + command + "'");
        }
        for (const auto& f : files) write_text(dir / f.first, f.second);
        return 0;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}

}  // namespace perfhom
