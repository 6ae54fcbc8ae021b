#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svi/pathsolver.hpp"

namespace svi {

struct ComplementarityReport {
    double min_X = 0.0;
    double max_eta = 0.0;
    /// Space-time integral of |X eta| (left-endpoint rule in time).
    double pairing = 0.0;
    /// Per time level: min X, max eta and the spatial integral of |X eta|.
    std::vector<double> slice_min_X;
    std::vector<double> slice_max_eta;
    std::vector<double> slice_pairing;
    /// Level holding the most negative X.
    std::size_t worst_level = 0;
};

/// Complementarity diagnostics for X >= 0, eta <= 0, X eta = 0.
ComplementarityReport complementarity_report(const Trajectory& X, const Trajectory& eta, const Grid& grid,
                                             const TimeGrid& tg);

struct EnergyReport {
    /// max over levels of (|y_n|^2 + int |grad y|^2) / (|x|^2 + int |f|^2 + delta^2).
    double ratio = 0.0;
    /// int (|beta_eps(y)|^2 + |lap y|^2) / (int |f|^2 + T delta^2); infinite if the denominator vanishes.
    double multiplier_ratio = 0.0;
    bool pass = false;
};

/// Discrete energy bound check; pass iff ratio <= slack.
EnergyReport energy_check(const Grid& grid, const PathSolution& sol, const Field& x, const ForcingSpec& f,
                          double delta, double slack);

struct RateFit {
    /// Abscissae (eps values or mesh widths), strictly decreasing.
    std::vector<double> params;
    std::vector<double> errors;
    /// Slope between consecutive points; the first entry is NaN.
    std::vector<double> slope_running;
    double slope = 0.0;
    double intercept = 0.0;
    /// Root-mean-square residual of the log-log fit.
    double residual = 0.0;
    /// All errors zero (nothing to fit).
    bool degenerate = false;
};

/// Least-squares fit of log e = slope log p + intercept over the positive errors.
RateFit fit_rate(std::vector<double> params, std::vector<double> errors);

/**
 * e(eps) = sup_n |y_eps(t_n) - y_ref(t_n)|_2 with the reference solved at min(eps) / 4 on the
 * same path and time grid. Needs at least 4 strictly decreasing, geometrically spaced eps.
 */
RateFit cauchy_rate_study(const Problem& problem, const std::vector<double>& eps_list, const BrownianPathSet& paths);

/// |y_h(T) - y_fine(T)|_2 on nested grids n, 2n+1, ...; the last entry of n_list is the reference.
RateFit mesh_rate_study(const Problem& problem, const std::vector<std::size_t>& n_list,
                        const BrownianPathSet& paths);

struct FunctionalStats {
    std::string name;
    double mean = 0.0;
    double variance = 0.0;
    double ci_half_width = 0.0;
    /// mean / (|x|^2 + int |f|^2).
    double empirical_c = 0.0;
};

struct EnsembleStats {
    std::size_t n_paths = 0;
    std::size_t n_failures = 0;
    std::vector<FunctionalStats> functionals;
    /// per_path[i][j]: functional j on the i-th successful path, in path_id order.
    std::vector<std::vector<double>> per_path;
    std::vector<std::uint64_t> path_ids;
    std::vector<std::string> failure_messages;

    /// More than 10% of the paths failed.
    bool failed() const;
    const FunctionalStats& get(const std::string& name) const;
    std::vector<double> column(const std::string& name) const;
};

/// Names of the per-path functionals reported by ensemble_run, in column order.
const std::vector<std::string>& ensemble_functionals();

/// Mean, unbiased variance and 1.96 sqrt(var / n) for a sample.
FunctionalStats summarize(std::string name, const std::vector<double>& values);

/**
 * Solves paths 0..n_paths-1 of base_seed on a pool of workers. Failed paths are excluded
 * and counted. The result does not depend on the number of workers.
 */
EnsembleStats ensemble_run(const Problem& problem, std::size_t n_paths, std::uint64_t base_seed, double slack,
                           unsigned workers = 1);

/// beta_k(T)^2 and delta^2 over sampled paths of m motions (no PDE solve).
EnsembleStats noise_statistics(const TimeGrid& tg, std::size_t m, std::size_t n_paths, std::uint64_t seed);

}  // namespace svi
