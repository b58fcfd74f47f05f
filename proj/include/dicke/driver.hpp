#pragma once

#include "dicke/metrology.hpp"
#include "dicke/solver.hpp"
#include "dicke/thermo.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dicke {

inline constexpr const char* kVersion = "0.1.0";

enum class Mode { sweep, husimi, thermo, convergence, scaling };
enum class Format { csv, json };

struct SweepConfig {
    Mode mode = Mode::sweep;
    double omega = 1.0;
    double omega0 = 1.0;
    double lambda_min = 0.0;
    double lambda_max = 1.0;
    int lambda_steps = 101;
    std::vector<double> lambdas;  // explicit list; overrides the grid when set
    std::vector<int> n_atoms_list{2, 6, 10, 20};
    double tol = kDefaultTol;
    std::optional<int> fock_cutoff;  // fixed cutoff instead of the doubling search
    int max_cutoff = kDefaultMaxCutoff;
    std::optional<int> grid_points;
    std::string output_path;  // empty: stdout
    Format output_format = Format::csv;
    int workers = 1;

    void validate() const;
    std::vector<double> lambda_grid() const;
};

struct SweepRecord {
    double lambda = 0.0;
    int n_atoms = 0;
    int n_cutoff = 0;
    double ground_energy = 0.0;
    double nbar = 0.0;
    double F_B = 0.0;
    double F_B_scaled = 0.0;
    double F_A = 0.0;
    double F_A_scaled = 0.0;
    double xi2 = 0.0;
    double quad_var_scaled = 0.0;  // 4 (Delta X_{pi/2})^2
    double parity_expect = 0.0;
    double discarded_mass_A = 0.0;
    double discarded_mass_B = 0.0;
    bool converged = true;
};

/// Everything a sweep row needs from one ground state.
struct PointAnalysis {
    CutoffSearch search;
    DensityMatrix rho_a;
    DensityMatrix rho_b;
    SweepRecord record;
};

/// Solves one (N, lambda) point. With fock_cutoff set, the cutoff is fixed
/// and `converged` reports whether its tail is below tol.
PointAnalysis analyze_point(const ModelParams& params, double tol,
                            std::optional<int> fock_cutoff = std::nullopt,
                            int max_cutoff = kDefaultMaxCutoff);

/// N-major, lambda ascending, independent of the worker count.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

struct HusimiResult {
    int n_atoms = 0;
    double lambda = 0.0;
    int n_cutoff = 0;
    double nbar = 0.0;
    HusimiMap atoms;
    HusimiMap field;
};

std::vector<HusimiResult> run_husimi(const SweepConfig& config);

struct ThermoRow {
    double lambda = 0.0;
    double mu = 0.0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    double xi2 = 0.0;
    double F_A_per_N = 0.0;
    double quad_var_scaled = 0.0;
    double F_B_scaled = 0.0;
    double nbar_per_N = 0.0;  // beta_s^2 / N, the N -> infinity value
    bool guard_band = false;
    bool critical = false;
};

std::vector<ThermoRow> run_thermo(const SweepConfig& config);

std::vector<ScalingReport> run_scaling(const SweepConfig& config);

struct ConvergenceTrace {
    int n_atoms = 0;
    double lambda = 0.0;
    std::vector<CutoffStep> steps;
    bool converged = false;
};

std::vector<ConvergenceTrace> run_convergence(const SweepConfig& config);

// Output ----------------------------------------------------------------------

/// Shortest decimal that round-trips (at most 17 significant digits).
std::string format_double(double v);

void write_sweep(const SweepConfig& config, const std::vector<SweepRecord>& rows, std::ostream& os);
void write_husimi(const SweepConfig& config, const std::vector<HusimiResult>& maps, std::ostream& os);
void write_thermo(const SweepConfig& config, const std::vector<ThermoRow>& rows, std::ostream& os);
void write_scaling(const SweepConfig& config, const std::vector<ScalingReport>& reps, std::ostream& os);
void write_convergence(const SweepConfig& config, const std::vector<ConvergenceTrace>& traces,
                       std::ostream& os);

/// Runs the configured mode and writes its output. Returns the process exit
/// code: 0 success, 4 convergence failure or low-confidence fit. Throws
/// InvalidArgument / IoError for the other failure classes.
int run(const SweepConfig& config);

} // namespace dicke
