#include "dicke/driver.hpp"
#include "dicke/error.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>

namespace {

constexpr int kExitInvalid = 2;
constexpr int kExitIo = 3;
constexpr int kExitConvergence = 4;

} // namespace

int main(int argc, char** argv) {
    dicke::SweepConfig cfg;
    CLI::App app{"Quantum Fisher information and squeezing of the Dicke-model ground state"};
    app.set_version_flag("--version", dicke::kVersion);
    app.set_config("--config", "", "key=value config file; command-line flags take precedence");
    app.require_subcommand(1);

    std::optional<int> fock_cutoff;
    std::optional<int> grid_points;
    std::string format = "csv";

    app.add_option("--omega", cfg.omega, "field frequency")->capture_default_str();
    app.add_option("--omega0", cfg.omega0, "atomic transition frequency")->capture_default_str();
    app.add_option("--lambda-min", cfg.lambda_min, "first coupling of the grid")->capture_default_str();
    app.add_option("--lambda-max", cfg.lambda_max, "last coupling of the grid")->capture_default_str();
    app.add_option("--lambda-steps", cfg.lambda_steps, "number of grid points")->capture_default_str();
    auto* lambda_opt = app.add_option("--lambda", cfg.lambdas, "explicit coupling (repeatable, replaces the grid)");
    auto* n_opt = app.add_option("--n-atoms", cfg.n_atoms_list, "atom number (repeatable)")->capture_default_str();
    app.add_option("--tol", cfg.tol, "cutoff convergence tolerance")->capture_default_str();
    app.add_option("--fock-cutoff", fock_cutoff, "fixed boson cutoff (skips the automatic search)");
    app.add_option("--max-cutoff", cfg.max_cutoff, "hard cap for the automatic cutoff search")->capture_default_str();
    app.add_option("--grid-points", grid_points, "Husimi grid points per axis (>= 11)");
    app.add_option("--out", cfg.output_path, "output file (default stdout)");
    app.add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--workers", cfg.workers, "concurrent sweep points")->capture_default_str();

    const std::map<std::string, dicke::Mode> modes{{"sweep", dicke::Mode::sweep},
                                                   {"husimi", dicke::Mode::husimi},
                                                   {"thermo", dicke::Mode::thermo},
                                                   {"scaling", dicke::Mode::scaling},
                                                   {"convergence", dicke::Mode::convergence}};
    const std::map<std::string, std::string> about{
        {"sweep", "finite-N QFI and squeezing over a coupling grid"},
        {"husimi", "Husimi Q maps of both subsystems"},
        {"thermo", "closed-form N -> infinity curves"},
        {"scaling", "critical exponents from the closed forms"},
        {"convergence", "Fock cutoff trajectories"}};
    for (const auto& [name, mode] : modes) {
        app.add_subcommand(name, about.at(name))->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInvalid;
    }

    for (const auto* sub : app.get_subcommands()) cfg.mode = modes.at(sub->get_name());
    cfg.fock_cutoff = fock_cutoff;
    cfg.grid_points = grid_points;
    cfg.output_format = format == "json" ? dicke::Format::json : dicke::Format::csv;

    if (cfg.mode == dicke::Mode::husimi) {
        if (n_opt->count() == 0) cfg.n_atoms_list = {20};
        if (lambda_opt->count() == 0 && app.get_option("--lambda-min")->count() == 0 &&
            app.get_option("--lambda-max")->count() == 0 && app.get_option("--lambda-steps")->count() == 0)
            cfg.lambdas = {0.0, 0.54, 1.0};
        if (app.get_option("--format")->count() == 0) cfg.output_format = dicke::Format::json;
    }

    try {
        return dicke::run(cfg);
    } catch (const dicke::InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const dicke::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const dicke::ConvergenceFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
