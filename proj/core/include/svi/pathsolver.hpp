#pragma once

#include <cstdint>
#include <vector>

#include "svi/catalog.hpp"
#include "svi/grid.hpp"
#include "svi/noise.hpp"
#include "svi/transform.hpp"

namespace svi {

struct SolveConfig {
    /// Implicitness of the Laplacian, in [1/2, 1].
    double theta = 1.0;
    double eps = 1e-3;
    double newton_tol = 1e-9;
    int newton_max = 200;
    double mu_cap = kDefaultMuCap;
    /// Reruns at halved dt allowed after a stability refusal.
    int max_halvings = 3;

    /// Throws ConfigError on out-of-range values.
    void validate() const;
};

/// Slices of a space-time field on the time grid.
struct Trajectory {
    std::vector<double> times;
    std::vector<Field> slices;

    std::size_t size() const { return slices.size(); }
    const Field& operator[](std::size_t n) const { return slices[n]; }
    const Field& back() const { return slices.back(); }
};

/// Coefficients of the transformed equation frozen at t_n.
struct StepCoefficients {
    double t = 0.0;
    Field mu;
    Field mu_tilde;
    VectorField grad_mu;
    Field lap_mu;
    VectorField g;
    /// Right-hand side of the transformed equation, e^-mu f.
    Field source;
    ReactionSpec reaction;

    /// Zero-noise coefficients with the given source.
    static StepCoefficients deterministic(const Grid& grid, Field source, ReactionSpec reaction = {},
                                          double t = 0.0);
};

/// Nonzero Dirichlet values on the two ends of a 1D interval, at t_n and t_{n+1}.
struct DirichletLift {
    double left_old = 0.0;
    double left_new = 0.0;
    double right_old = 0.0;
    double right_new = 0.0;

    bool active() const { return left_old != 0.0 || left_new != 0.0 || right_old != 0.0 || right_new != 0.0; }
};

struct StepResult {
    Field y;
    int newton_iterations = 0;
    double residual = 0.0;
    /// dt sup|g| / h; the step is refused above 1.
    double stability_margin = 0.0;
};

/// dt sup|g| / min h.
double stability_margin(const Grid& grid, const VectorField& g, double dt);

/**
 * One theta-step of the penalized transformed equation with interior obstacle:
 *
 *   (I - dt theta L_h) y + dt beta_eps(y)
 *       = y_n + dt [(1 - theta) L_h y_n - F~(t_n, y_n) - g . grad y_n + source].
 *
 * Throws StabilityViolation if dt sup|g| / h > 1, NumericalFailure if Newton fails.
 */
StepResult step_interior(const Grid& grid, const Field& y_n, const StepCoefficients& coeffs, double dt,
                         const SolveConfig& cfg, const DirichletLift& lift = {});

struct StepDiagnostics {
    int newton_iterations = 0;
    double residual = 0.0;
    double stability_margin = 0.0;
};

struct PathSolution {
    TimeGrid tg{1.0, 1};
    /// Transformed unknown y.
    Trajectory y;
    /// beta_eps(y), the multiplier in transformed variables.
    Trajectory eta;
    /// X = e^mu y.
    Trajectory X;
    /// e^mu eta, the multiplier in original variables.
    Trajectory eta_X;
    Trajectory mu;
    std::vector<StepDiagnostics> diagnostics;
    double eps = 0.0;
    double delta = 0.0;
    /// dt halvings needed to satisfy the stability guard.
    int halvings = 0;
};

/// Assembles noise and transform coefficients at t_n for the given forcing.
StepCoefficients assemble_coefficients(const Grid& grid, const CoeffSpec& cs, const ReactionSpec& rs,
                                       const ForcingSpec& f, const BrownianPathSet& paths, std::size_t n,
                                       double mu_cap);

/**
 * Path-wise solve of the obstacle problem through the exponential transform.
 * Requires a Dirichlet grid and a path set sampled on tg.
 */
PathSolution solve_path(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const ReactionSpec& rs,
                        const ForcingSpec& f, const InitialSpec& x, const SolveConfig& cfg,
                        const BrownianPathSet& paths);

/// solve_path, rerun on the bridge-refined path at halved dt after each stability
/// refusal, up to cfg.max_halvings times.
PathSolution solve_path_adaptive(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs,
                                 const ReactionSpec& rs, const ForcingSpec& f, const InitialSpec& x,
                                 const SolveConfig& cfg, const BrownianPathSet& paths);

/// beta_eps applied to every slice of sol.y.
Trajectory recover_multiplier(const PathSolution& sol);

/**
 * Euler-Maruyama on the original equation: implicit Laplacian and penalty,
 * explicit reaction, noise X_n sum_k mu_k(t_n) dbeta_k(n).
 */
PathSolution direct_em_solve(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const ReactionSpec& rs,
                             const ForcingSpec& f, const InitialSpec& x, const SolveConfig& cfg,
                             const BrownianPathSet& paths);

/// Everything needed to run one path; shared by the analysis drivers and the CLI.
struct Problem {
    Grid grid;
    TimeGrid tg;
    CoeffSpec coeffs;
    ReactionSpec reaction;
    ForcingSpec forcing;
    InitialSpec initial;
    SolveConfig cfg;

    BrownianPathSet paths(std::uint64_t seed, std::uint64_t path_id) const {
        return sample_paths(tg, coeffs.m(), seed, path_id);
    }
    PathSolution solve(const BrownianPathSet& p) const {
        return solve_path_adaptive(grid, tg, coeffs, reaction, forcing, initial, cfg, p);
    }
};

}  // namespace svi
