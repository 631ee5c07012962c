/// @file study.hpp
/// @brief End-to-end pipeline: configuration, the eps-convergence study and CLI dispatch.

#pragma once

#include "perfhom/effective_model.hpp"
#include "perfhom/fine_solver.hpp"
#include "perfhom/macro_solver.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace perfhom {

struct StudyConfig {
    CellGeometry cell;
    CoefficientSet coefficients;
    std::vector<int> tiles{2, 4, 8, 16};  ///< eps = 1/N
    int macro_refinement = 6;
    double tol = 1e-10;
    bool floor_check = true;  ///< rerun the finest eps with the cell refined once more
};

/// Throws InvalidConfig on unknown keys, wrong types or out-of-range values.
StudyConfig parse_config(const nlohmann::json& j);
StudyConfig load_config(const std::filesystem::path& path);

/// Everything that does not depend on eps.
struct CellStage {
    StudyConfig config;
    std::shared_ptr<const TriMesh> cell;
    CoefficientSet coefficients;  ///< alpha carries the discrete mean correction
    std::shared_ptr<const CellSolutionSet> cells;
    HomogenizedModel model;
    double sigma_measure = 0.0;                ///< |Sigma_h|
    std::array<double, 2> alpha_zeta{};        ///< int_Sigma alpha zeta_k
    double alpha_gamma = 0.0;                  ///< int_Sigma alpha gamma
};

/// Validates the coefficients (NotElliptic, NotPositive, InvalidConfig) and solves the cell problems.
CellStage run_cell_stage(const StudyConfig& cfg);

/// m, mu0, C_s at delta = sqrt(m / mu0) and sup |alpha|. Without holes C_s = 0.
CoercivityCheck coercivity_gate(const TriMesh& cell, const CoefficientSet& coefficients);

struct ConvergenceRow {
    int tiles = 0;
    double eps = 0.0;
    double h = 0.0;
    double e0 = 0.0;
    double e1 = 0.0;
    std::optional<double> rate0;
    std::optional<double> rate1;
    double s1 = 0.0;
    double s2 = 0.0;
    AprioriReport apriori;
    std::string error;  ///< non-empty when this eps failed
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;  ///< decreasing eps
    HomogenizedModel model;
    CoercivityCheck gate;
    double peclet = 0.0;
    std::optional<double> discretization_floor;  ///< |e0(L) - e0(L+1)| at the finest eps

    bool complete() const;
};

/// Errors for a single eps are recorded in its row; everything else propagates.
ConvergenceReport run_convergence_study(const StudyConfig& cfg, bool force = false);

struct SurfaceIdentityRow {
    double eps = 0.0;
    double s1 = 0.0;
    double s2 = 0.0;
};

std::vector<SurfaceIdentityRow> run_surface_identity_checks(const StudyConfig& cfg, bool force = false);

/// CSV `eps,h,e0,e1,rate0,rate1,s1,s2,grad_norm,l2_norm,sigma_norm,c0`; failed rows carry `nan`.
void write_convergence_csv(const ConvergenceReport& report, std::ostream& out);

struct PipelineOptions {
    std::filesystem::path output_dir = ".";
    bool force = false;
    std::optional<double> tol;
    bool vtk = false;
};

/// Runs one subcommand (mesh, cell, homogenize, fine, macro, converge, check) and writes
/// its artifacts. Returns 0 on success, 2 on validation errors, 3 on solver errors.
int run_pipeline(const std::string& command, const StudyConfig& cfg, const PipelineOptions& options,
                 std::ostream& log);

/// Exit code for an exception escaping the pipeline.
int exit_code_for(const std::exception& e);

}  // namespace perfhom
