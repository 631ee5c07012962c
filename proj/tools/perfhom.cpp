// Command-line front end: perfhom <command> -c config.json [-o outdir] [--force] [--tol t]

#include "perfhom/study.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Periodic homogenization of Robin problems on perforated domains"};
    app.require_subcommand(1, 1);

    std::string config_path;
    perfhom::PipelineOptions options;
    double tol = 0.0;

    const char* commands[][2] = {
        {"mesh", "Build and dump the cell, fine and macro meshes"},
        {"cell", "Solve the periodic cell problems"},
        {"homogenize", "Compute the homogenized model"},
        {"fine", "Solve the eps-problems and report a priori norms"},
        {"macro", "Solve the homogenized problem and sample the corrected field"},
        {"converge", "Run the eps-convergence study"},
        {"check", "Evaluate the coercivity gate"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("-c,--config", config_path, "JSON configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("-o,--output", options.output_dir, "Output directory");
        sub->add_flag("--force", options.force, "Proceed even if the coercivity gate fails");
        sub->add_option("--tol", tol, "Relative residual tolerance of linear solves")->check(CLI::PositiveNumber);
        sub->add_flag("--vtk", options.vtk, "Also write legacy VTK files");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (tol > 0.0) options.tol = tol;

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const perfhom::StudyConfig cfg = perfhom::load_config(config_path);
        return perfhom::run_pipeline(command, cfg, options, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return perfhom::exit_code_for(e);
    }
}
