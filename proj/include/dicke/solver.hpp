#pragma once

#include "dicke/error.hpp"
#include "dicke/model.hpp"

#include <vector>

namespace dicke {

constexpr double kDefaultTol = 1e-10;
constexpr int kDefaultMaxCutoff = 1 << 14;

struct ConvergenceRecord {
    double tail_population = 0.0;  // weight in the top 10% of Fock levels
    double energy_shift = 0.0;     // |E(n) - E(previous cutoff)|, NaN if none
};

struct GroundState {
    double energy = 0.0;
    Eigen::VectorXcd vector;  // full product basis, unit norm
    ModelParams params;
    BasisIndexer basis{1, 1};
    ConvergenceRecord convergence;

    int n_cutoff() const { return basis.n_cutoff(); }
    // psi(n, k) view, rows = Fock level, cols = k = m + j
    Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
    amplitudes() const {
        return {vector.data(), basis.boson_dim(), basis.spin_dim()};
    }
};

/// Lowest eigenpair of the even-parity block at fixed cutoff, embedded into
/// the full basis with the largest amplitude made real positive.
GroundState ground_state(const ModelParams& params, int n_cutoff);

/// Probability carried by the top ceil(10%) of Fock levels.
double tail_population(const GroundState& gs);

int initial_cutoff(const ModelParams& params);

struct CutoffStep {
    int n_cutoff;
    double energy;
    double tail_population;
    double energy_shift;  // relative to the previous step, NaN on the first
};

struct CutoffSearch {
    GroundState state;
    std::vector<CutoffStep> trajectory;
    bool converged = false;
};

/// Doubles the cutoff from initial_cutoff() until the tail and the energy
/// shift between successive cutoffs are both below tol. Never throws on
/// non-convergence; the returned state is the last one computed.
CutoffSearch search_cutoff(const ModelParams& params, double tol = kDefaultTol,
                           int max_cutoff = kDefaultMaxCutoff);

struct CutoffFailure : ConvergenceFailure {
    CutoffFailure(const std::string& what, CutoffSearch partial)
        : ConvergenceFailure(what), search(std::move(partial)) {}
    CutoffSearch search;
};

/// search_cutoff() that throws CutoffFailure when the cap is reached first.
CutoffSearch converge_cutoff(const ModelParams& params, double tol = kDefaultTol,
                             int max_cutoff = kDefaultMaxCutoff);

cplx expectation(const Eigen::VectorXcd& state, const HermitianOperator& op);

/// <g|A|g>; A may act on the product space or on either factor alone.
cplx expectation(const GroundState& gs, const HermitianOperator& op);

} // namespace dicke
