#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "svi/errors.hpp"
#include "svi/pathsolver.hpp"
#include "svi/penalty.hpp"

using namespace svi;

namespace {

InitialSpec sine(double amp) {
    InitialSpec x;
    x.kind = InitialKind::Sine;
    x.amplitude = amp;
    return x;
}

ForcingSpec constant(double a) {
    ForcingSpec f;
    f.kind = ForcingKind::Constant;
    f.amplitude = a;
    return f;
}

CoeffSpec constant_mu(double c) {
    CoeffTerm t;
    t.amplitude = c;
    return CoeffSpec{{t}};
}

/// Discrete eigenvalue of -L_h for sin(pi xi) on n interior nodes of [0, 1].
double lambda_h(std::size_t n) {
    const double h = 1.0 / static_cast<double>(n + 1);
    return 4.0 / (h * h) * std::pow(std::sin(std::numbers::pi * h / 2.0), 2);
}

}  // namespace

TEST(SolveConfig, Validation) {
    SolveConfig c;
    EXPECT_NO_THROW(c.validate());
    EXPECT_DOUBLE_EQ(c.theta, 1.0);
    c.theta = 0.4;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SolveConfig{};
    c.eps = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = SolveConfig{};
    c.max_halvings = -1;
    EXPECT_THROW(c.validate(), ConfigError);
}

TEST(PathSolver, HeatMatchesDiscreteEigenDecay) {
    const std::size_t n = 63;
    const Grid g = build_grid(1, {1.0}, n, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 100);
    const SolveConfig cfg;
    const PathSolution sol = solve_path(g, tg, CoeffSpec{}, {}, {}, sine(1.0), cfg, sample_paths(tg, 0, 1, 0));
    const double decay = std::pow(1.0 + tg.dt() * lambda_h(n), -100.0);
    for (std::size_t k = 0; k < n; ++k) {
        EXPECT_NEAR(sol.y.back()[k], decay * std::sin(std::numbers::pi * g.coord(k, 0)), 1e-12);
    }
    for (const Field& eta : sol.eta.slices) EXPECT_EQ(norm_max(eta), 0.0);
    EXPECT_EQ(sol.y.size(), 101u);
    EXPECT_DOUBLE_EQ(sol.y.times.back(), 0.1);
}

TEST(PathSolver, HeatConvergesToContinuousSolution) {
    const Grid g = build_grid(1, {1.0}, 255, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 1000);
    const PathSolution sol = solve_path(g, tg, CoeffSpec{}, {}, {}, sine(1.0), SolveConfig{}, sample_paths(tg, 0, 1, 0));
    double err = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double exact = std::exp(-std::numbers::pi * std::numbers::pi * 0.1) * std::sin(std::numbers::pi * g.coord(k, 0));
        err = std::max(err, std::abs(sol.y.back()[k] - exact));
    }
    EXPECT_LT(err, 5e-3);
}

TEST(PathSolver, CrankNicolsonIsMoreAccurateInTime) {
    const Grid g = build_grid(1, {1.0}, 127, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 20);
    auto error = [&](double theta) {
        SolveConfig cfg;
        cfg.theta = theta;
        const PathSolution sol = solve_path(g, tg, CoeffSpec{}, {}, {}, sine(1.0), cfg, sample_paths(tg, 0, 1, 0));
        const double exact = std::exp(-lambda_h(127) * 0.1);
        return std::abs(sol.y.back()[63] / std::sin(std::numbers::pi * g.coord(63, 0)) - exact);
    };
    EXPECT_LT(error(0.5), 0.1 * error(1.0));
}

TEST(PathSolver, ConstantNoiseShiftsDecayByHalfSquare) {
    // mu = c beta: the transformed equation is y_t = y_xx - c^2 y / 2 with no transport,
    // the reaction taken explicitly.
    const std::size_t n = 31;
    const double c = 0.9;
    const Grid g = build_grid(1, {1.0}, n, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.2, 40);
    const BrownianPathSet p = sample_paths(tg, 1, 3, 7);
    const PathSolution sol = solve_path(g, tg, constant_mu(c), {}, {}, sine(1.0), SolveConfig{}, p);
    const double factor = (1.0 - 0.5 * c * c * tg.dt()) / (1.0 + tg.dt() * lambda_h(n));
    for (std::size_t step = 0; step <= 40; ++step) {
        const double decay = std::pow(factor, static_cast<double>(step));
        for (std::size_t k = 0; k < n; k += 5) {
            const double s = std::sin(std::numbers::pi * g.coord(k, 0));
            EXPECT_NEAR(sol.y[step][k], decay * s, 1e-12);
            EXPECT_NEAR(sol.X[step][k], std::exp(c * p.value(0, step)) * decay * s, 1e-11);
        }
    }
}

TEST(PathSolver, PinnedMidNodeFollowsPenalizedOde) {
    // Far from the walls y is spatially flat and obeys y' = -1 - y / eps implicitly.
    const Grid g = build_grid(1, {1.0}, 201, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.05, 50);
    SolveConfig cfg;
    cfg.eps = 1e-3;
    const PathSolution sol = solve_path(g, tg, CoeffSpec{}, {}, constant(-1.0), InitialSpec{}, cfg,
                                        sample_paths(tg, 0, 1, 0));
    const double dt = tg.dt();
    double y = 0.0;
    for (std::size_t step = 1; step <= 50; ++step) {
        y = (y - dt) / (1.0 + dt / cfg.eps);
        EXPECT_NEAR(sol.y[step][100], y, 1e-9);
        EXPECT_NEAR(sol.eta[step][100], beta_eps(y, cfg.eps), 1e-6);
    }
    EXPECT_NEAR(y, -cfg.eps, 1e-6);
}

TEST(PathSolver, DirectEulerMatchesTransformWithoutNoise) {
    const Grid g = build_grid(1, {1.0}, 63, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 100);
    ForcingSpec f;
    f.kind = ForcingKind::Halves;
    f.amplitude = 1.0;
    f.secondary = -4.0;
    SolveConfig cfg;
    cfg.eps = 1e-3;
    cfg.newton_tol = 1e-12;
    const BrownianPathSet p = sample_paths(tg, 0, 1, 0);
    const PathSolution a = solve_path(g, tg, CoeffSpec{}, {}, f, sine(0.2), cfg, p);
    const PathSolution b = direct_em_solve(g, tg, CoeffSpec{}, {}, f, sine(0.2), cfg, p);
    for (std::size_t step = 0; step <= tg.steps(); step += 10) {
        for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(a.X[step][k], b.X[step][k], 1e-10);
    }
    EXPECT_GT(norm_max(a.eta.back()), 0.0);
}

TEST(PathSolver, MultiplierIsNonPositiveAndRecoverable) {
    const Grid g = build_grid(2, {1.0, 1.0}, 15, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.05, 25);
    CoeffTerm t;
    t.amplitude = 0.3;
    t.space.kind = SpaceKind::Sine;
    const CoeffSpec cs{{t}};
    const PathSolution sol = solve_path(g, tg, cs, {}, constant(-1.0), sine(0.1), SolveConfig{}, sample_paths(tg, 1, 2, 0));
    const Trajectory eta = recover_multiplier(sol);
    for (std::size_t step = 0; step < eta.size(); ++step) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            EXPECT_LE(eta[step][k], 0.0);
            EXPECT_EQ(eta[step][k], sol.eta[step][k]);
            EXPECT_NEAR(sol.eta_X[step][k], std::exp(sol.mu[step][k]) * eta[step][k], 1e-9 * (1.0 + std::abs(eta[step][k])));
        }
    }
}

TEST(PathSolver, StabilityGuardRefusesAndAdaptiveHalvingRecovers) {
    const Grid g = build_grid(1, {1.0}, 63, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 10);
    CoeffTerm t;
    t.amplitude = 5.0;
    t.space.kind = SpaceKind::Sine;
    const CoeffSpec cs{{t}};
    SolveConfig cfg;
    const BrownianPathSet p = sample_paths(tg, 1, 4, 0);
    try {
        solve_path(g, tg, cs, {}, {}, sine(1.0), cfg, p);
        FAIL() << "expected StabilityViolation";
    } catch (const StabilityViolation& e) {
        EXPECT_GT(e.margin(), 1.0);
    }
    cfg.max_halvings = 8;
    const PathSolution sol = solve_path_adaptive(g, tg, cs, {}, {}, sine(1.0), cfg, p);
    EXPECT_GT(sol.halvings, 0);
    EXPECT_EQ(sol.tg.steps(), 10u << sol.halvings);
    for (const StepDiagnostics& d : sol.diagnostics) EXPECT_LE(d.stability_margin, 1.0);
    // The refined path agrees with the coarse one at the coarse times.
    EXPECT_NEAR(sol.mu.back()[31], eval_mu(cs, p, 10, g)[31], 1e-12);
    cfg.max_halvings = 0;
    EXPECT_THROW(solve_path_adaptive(g, tg, cs, {}, {}, sine(1.0), cfg, p), StabilityViolation);
}

TEST(PathSolver, RejectsNeumannGridAndMismatchedPaths) {
    const Grid n = build_grid(1, {1.0}, 16, BoundaryKind::Neumann);
    const TimeGrid tg(0.1, 10);
    EXPECT_THROW(solve_path(n, tg, CoeffSpec{}, {}, {}, InitialSpec{}, SolveConfig{}, sample_paths(tg, 0, 1, 0)),
                 ConfigError);
    const Grid d = build_grid(1, {1.0}, 16, BoundaryKind::Dirichlet);
    EXPECT_THROW(solve_path(d, tg, CoeffSpec{}, {}, {}, InitialSpec{}, SolveConfig{},
                            sample_paths(TimeGrid(0.1, 20), 0, 1, 0)),
                 SizeMismatch);
}

TEST(PathSolver, MuCapTurnsIntoNumericalFailure) {
    const Grid g = build_grid(1, {1.0}, 15, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 20);
    SolveConfig cfg;
    cfg.mu_cap = 1e-3;
    EXPECT_THROW(solve_path(g, tg, constant_mu(1.0), {}, {}, sine(1.0), cfg, sample_paths(tg, 1, 1, 0)),
                 NumericalFailure);
}
