#include "perfhom/effective_model.hpp"

#include "perfhom/errors.hpp"

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace perfhom {

namespace {

// Per-element data shared by every cell integral: area, averaged A, and the
// constant gradients of zeta_1, zeta_2, gamma.
struct CellElement {
    double area;
    Mat2 A;
    std::array<Vec2, 2> grad_zeta;
    Vec2 grad_gamma;
};

std::vector<CellElement> cell_elements(const CellSolutionSet& cells, const MatrixField& A) {
    check_same_mesh(cells);
    const TriMesh& mesh = *cells.mesh;
    const auto coeff = micro_coefficient(A);
    std::vector<CellElement> out;
    out.reserve(mesh.triangles.size());
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        out.push_back({triangle_area(mesh, t), element_matrix_average(mesh, t, coeff),
                       {cells.zeta1.gradient(t), cells.zeta2.gradient(t)}, cells.gamma.gradient(t)});
    }
    return out;
}

// int_Sigma alpha w with the same edge quadrature as the gamma load.
double sigma_pairing(const CellSolutionSet& cells, const SurfaceResistivity& alpha, const FEFunction& w) {
    if (!cells.mesh->has_tag(EdgeTag::Sigma) || alpha.is_zero()) return 0.0;
    return assemble_load(*cells.mesh, micro_coefficient(alpha), EdgeTag::Sigma).dot(w.values);
}

nlohmann::json factor_json(const SourceFactor& f) { return nlohmann::json::array({f.axis + 1, f.wave}); }

}  // namespace

void check_same_mesh(const CellSolutionSet& cells) {
    if (!cells.mesh) throw Error(ErrorKind::MeshMismatch, "cell solution set has no mesh");
    for (const FEFunction* f : {&cells.zeta1, &cells.zeta2, &cells.gamma, &cells.theta}) {
        if (!f->mesh || (f->mesh != cells.mesh && f->mesh->fingerprint() != cells.mesh->fingerprint()))
            throw Error(ErrorKind::MeshMismatch, "cell fields were solved on different meshes");
    }
}

double relative_gap(double a, double b, double floor) {
    const double scale = std::max({std::abs(a), std::abs(b), floor});
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

AHomForms compute_A_hom_forms(const CellSolutionSet& cells, const MatrixField& A) {
    AHomForms out;
    for (const auto& el : cell_elements(cells, A)) {
        for (int j = 0; j < 2; ++j) {
            const Vec2 flux = el.A * (Vec2::Unit(j) + el.grad_zeta[j]);
            for (int i = 0; i < 2; ++i) {
                out.definition(i, j) += el.area * flux[i];
                out.energy(i, j) += el.area * flux.dot(Vec2::Unit(i) + el.grad_zeta[i]);
            }
        }
    }
    return out;
}

Mat2 compute_A_hom(const CellSolutionSet& cells, const MatrixField& A) { return compute_A_hom_forms(cells, A).definition; }

BForms compute_B_forms(const CellSolutionSet& cells, const MatrixField& A, const SurfaceResistivity& alpha) {
    BForms out;
    for (const auto& el : cell_elements(cells, A)) {
        const Vec2 a_grad_gamma = el.A * el.grad_gamma;
        const Mat2 skew = el.A - el.A.transpose();
        for (int i = 0; i < 2; ++i) {
            const Vec2 ei = Vec2::Unit(i) + el.grad_zeta[i];
            out.direct[i] -= el.area * a_grad_gamma[i];
            out.substituted[i] -= el.area * a_grad_gamma.dot(ei);
            out.antisymmetric[i] += el.area * el.grad_gamma.dot(skew * ei);
        }
    }
    out.direct[0] += sigma_pairing(cells, alpha, cells.zeta1);
    out.direct[1] += sigma_pairing(cells, alpha, cells.zeta2);
    return out;
}

Vec2 compute_B(const CellSolutionSet& cells, const MatrixField& A, const SurfaceResistivity& alpha) {
    return compute_B_forms(cells, A, alpha).direct;
}

LambdaForms compute_lambda_forms(const CellSolutionSet& cells, const MatrixField& A, const SurfaceResistivity& alpha,
                                 const ScalarVolumeField& mu) {
    LambdaForms out;
    out.mu_tilde = integrate(*cells.mesh, micro_coefficient(mu));
    double dissipation = 0.0;
    for (const auto& el : cell_elements(cells, A)) dissipation += el.area * (el.A * el.grad_gamma).dot(el.grad_gamma);
    out.energy = out.mu_tilde - dissipation;
    out.surface = out.mu_tilde + sigma_pairing(cells, alpha, cells.gamma);
    return out;
}

SourceField compute_F(const SourceField& f, const SourceField& g, const TriMesh& cell) {
    SourceField out;
    for (const auto& t : f.terms) {
        const double w = integrate(cell, [&t](const EvalPoint& p) { return t.micro(p.y); });
        out.terms.push_back({t.coefficient * w, t.macro, {}});
    }
    if (cell.has_tag(EdgeTag::Sigma)) {
        for (const auto& t : g.terms) {
            const double w = integrate(cell, [&t](const EvalPoint& p) { return t.micro(p.y); }, EdgeTag::Sigma);
            out.terms.push_back({t.coefficient * w, t.macro, {}});
        }
    }
    return out;
}

HomogenizedModel build_model(const CellSolutionSet& cells, const CoefficientSet& coefficients) {
    HomogenizedModel model;
    model.a_forms = compute_A_hom_forms(cells, coefficients.A);
    model.b_forms = compute_B_forms(cells, coefficients.A, coefficients.alpha);
    model.lambda_forms = compute_lambda_forms(cells, coefficients.A, coefficients.alpha, coefficients.mu);
    model.A_hom = model.a_forms.definition;
    model.B = model.b_forms.direct;
    model.lambda = model.lambda_forms.energy;
    model.mu_tilde = model.lambda_forms.mu_tilde;
    model.F = compute_F(coefficients.f, coefficients.g, *cells.mesh);
    model.provenance = {cells.mesh->fingerprint(), fingerprint(coefficients)};

    const Mat2 sym = 0.5 * (model.A_hom + model.A_hom.transpose());
    const double lo = Eigen::SelfAdjointEigenSolver<Mat2>(sym).eigenvalues().minCoeff();
    if (!(lo > 0.0))
        throw Error(ErrorKind::NotElliptic, "symmetric part of A_hom has eigenvalue " + std::to_string(lo));
    if (model.lambda > model.mu_tilde * (1.0 + 1e-12))
        throw Error(ErrorKind::SolverBreakdown, "lambda exceeds mu_tilde");
    return model;
}

nlohmann::json to_json(const SourceField& field) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : field.terms)
        terms.push_back({{"c", t.coefficient}, {"x", factor_json(t.macro)}, {"y", factor_json(t.micro)}});
    return {{"terms", terms}};
}

nlohmann::json to_json(const HomogenizedModel& m) {
    auto mat = [](const Mat2& a) {
        return nlohmann::json::array({{a(0, 0), a(0, 1)}, {a(1, 0), a(1, 1)}});
    };
    auto vec = [](const Vec2& v) { return nlohmann::json::array({v[0], v[1]}); };
    return {
        {"A_hom", mat(m.A_hom)},
        {"B", vec(m.B)},
        {"lambda", m.lambda},
        {"mu_tilde", m.mu_tilde},
        {"F", to_json(m.F)},
        {"provenance",
         {{"cell_mesh", std::to_string(m.provenance.cell_mesh)},
          {"coefficients", std::to_string(m.provenance.coefficients)}}},
        {"checks",
         {{"A_hom_energy", mat(m.a_forms.energy)},
          {"B_substituted", vec(m.b_forms.substituted)},
          {"B_antisymmetric", vec(m.b_forms.antisymmetric)},
          {"lambda_surface", m.lambda_forms.surface}}},
    };
}

}  // namespace perfhom
