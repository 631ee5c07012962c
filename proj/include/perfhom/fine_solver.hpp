/// @file fine_solver.hpp
/// @brief The eps-problem with Robin resistivity on the holes, plus its stability guardrails.

#pragma once

#include "perfhom/coefficients.hpp"
#include "perfhom/fem.hpp"

#include <iosfwd>
#include <memory>
#include <span>

namespace perfhom {

struct FineProblem {
    int tiles = 1;  ///< N, eps = 1/N
    double eps = 1.0;
    std::shared_ptr<const TriMesh> mesh;
    std::shared_ptr<const TriMesh> cell;
    CoefficientSet coefficients;
};

/// Tiles `cell` N x N; coefficients are evaluated at y = x/eps (mod the cell).
FineProblem make_fine_problem(std::shared_ptr<const TriMesh> cell, const CoefficientSet& coefficients, int tiles);

struct CoercivityCheck {
    bool ok = false;
    double c0 = 0.0;
    double m = 0.0;
    double mu0 = 0.0;
    double trace_constant = 0.0;
    double alpha_max = 0.0;
};

/// ok iff sqrt(mu0 m) > C_s alpha_max; c0 = (1 - C_s alpha_max / sqrt(m mu0)) min(m, mu0).
CoercivityCheck check_coercivity(double m, double mu0, double trace_constant, double alpha_max);

struct TraceConstant {
    double value = 0.0;
    double delta = 1.0;
    int iterations = 0;
};

/// Largest lambda with M_Sigma v = lambda (M / delta + delta K) v over all P1 functions
/// on the cell (no periodicity), by power iteration. Throws EmptySigma.
TraceConstant estimate_trace_constant(const TriMesh& cell, double delta, double tol = 1e-8, int max_iterations = 100000);

/// Throws CoercivityFailed when the gate is closed and `force` is false.
FEFunction solve_robin_fine(const FineProblem& p, const CoercivityCheck& gate, double tol = 1e-10, bool force = false,
                            double* residual = nullptr);

struct AprioriReport {
    double eps = 0.0;
    double h = 0.0;
    double grad_norm = 0.0;
    double l2_norm = 0.0;
    double sigma_norm = 0.0;
    double f_norm = 0.0;
    double sqrt_eps_g_norm = 0.0;
    double c0 = 0.0;
    bool coercive = false;
};

AprioriReport apriori_report(const FEFunction& u, const FineProblem& p, const CoercivityCheck& gate);

/// CSV `eps,h,grad_norm,l2_norm,sigma_norm,f_norm,sqrt_eps_g_norm,c0,coercive`.
void write_report_csv(std::span<const AprioriReport> rows, std::ostream& out);

}  // namespace perfhom
