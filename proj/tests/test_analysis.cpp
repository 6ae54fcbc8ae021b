#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "svi/analysis.hpp"
#include "svi/errors.hpp"
#include "svi/penalty.hpp"

using namespace svi;

namespace {

Problem pinned_problem(std::size_t n = 63) {
    ForcingSpec f;
    f.kind = ForcingKind::Constant;
    f.amplitude = -1.0;
    return Problem{build_grid(1, {1.0}, n, BoundaryKind::Dirichlet), TimeGrid(0.1, 100), CoeffSpec{}, {}, f, {}, {}};
}

Problem noisy_problem() {
    CoeffTerm t;
    t.amplitude = 0.5;
    t.space.kind = SpaceKind::Sine;
    ForcingSpec f;
    f.kind = ForcingKind::Halves;
    f.amplitude = 1.0;
    f.secondary = -2.0;
    InitialSpec x;
    x.kind = InitialKind::Sine;
    x.amplitude = 1.0;
    return Problem{build_grid(1, {1.0}, 31, BoundaryKind::Dirichlet), TimeGrid(0.2, 100), CoeffSpec{{t}}, {}, f, x, {}};
}

Trajectory constant_trajectory(const Grid& g, std::size_t levels, double v) {
    Trajectory tr;
    for (std::size_t n = 0; n < levels; ++n) {
        tr.times.push_back(static_cast<double>(n));
        tr.slices.emplace_back(g.size(), v);
    }
    return tr;
}

}  // namespace

TEST(Complementarity, ExactPairHasZeroPairing) {
    const Grid g = build_grid(1, {1.0}, 11, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 4);
    Trajectory X = constant_trajectory(g, 5, 0.0);
    Trajectory eta = constant_trajectory(g, 5, 0.0);
    for (std::size_t n = 0; n < 5; ++n) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (k % 2) X.slices[n][k] = 1.0 + n;
            else eta.slices[n][k] = -3.0;
        }
    }
    const ComplementarityReport r = complementarity_report(X, eta, g, tg);
    EXPECT_EQ(r.pairing, 0.0);
    EXPECT_EQ(r.min_X, 0.0);
    EXPECT_EQ(r.max_eta, 0.0);
    EXPECT_EQ(r.slice_pairing.size(), 5u);
}

TEST(Complementarity, LeftEndpointPairingAndWorstLevel) {
    const Grid g = build_grid(1, {1.0}, 9, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 2);
    Trajectory X = constant_trajectory(g, 3, -0.5);
    X.slices[2][3] = -2.0;
    Trajectory eta = constant_trajectory(g, 3, -1.0);
    eta.slices[1][0] = 0.25;
    const ComplementarityReport r = complementarity_report(X, eta, g, tg);
    // Levels 0 and 1 each contribute |X eta| = 0.5 over the measure 0.9 (interior weights).
    const double w = 0.1 * 9.0;
    EXPECT_NEAR(r.pairing, 0.5 * (0.5 * w) + 0.5 * (0.5 * (w - 0.1) + 0.5 * 0.25 * 0.1), 1e-14);
    EXPECT_EQ(r.min_X, -2.0);
    EXPECT_EQ(r.worst_level, 2u);
    EXPECT_EQ(r.max_eta, 0.25);
    EXPECT_THROW(complementarity_report(X, constant_trajectory(g, 2, 0.0), g, tg), SizeMismatch);
}

TEST(Complementarity, PenalizedSolutionApproachesExactPair) {
    const Problem p = pinned_problem();
    double prev = std::numeric_limits<double>::infinity();
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        SolveConfig cfg;
        cfg.eps = eps;
        const PathSolution sol =
            solve_path(p.grid, p.tg, p.coeffs, p.reaction, p.forcing, p.initial, cfg, p.paths(1, 0));
        const ComplementarityReport r = complementarity_report(sol.X, sol.eta_X, p.grid, p.tg);
        EXPECT_LE(r.max_eta, 0.0);
        EXPECT_GE(r.min_X, -1.01 * eps);
        EXPECT_LT(-r.min_X, prev);
        prev = -r.min_X;
    }
}

TEST(Energy, PureDiffusionRatioBelowOne) {
    // |y_N|^2 + 2 int |grad y|^2 <= |x|^2 for implicit Euler, so the ratio is at most 1.
    Problem p = pinned_problem();
    p.forcing = {};
    p.initial.kind = InitialKind::Sine;
    p.initial.amplitude = 2.0;
    const PathSolution sol = p.solve(p.paths(1, 0));
    const EnergyReport e = energy_check(p.grid, sol, p.initial.eval(p.grid), p.forcing, 0.0, 10.0);
    EXPECT_LE(e.ratio, 1.0 + 1e-12);
    EXPECT_GE(e.ratio, 1.0 - 1e-12);  // attained at t = 0
    EXPECT_TRUE(e.pass);
    EXPECT_TRUE(std::isinf(e.multiplier_ratio));
}

TEST(Energy, ZeroDataGivesZeroRatio) {
    Problem p = pinned_problem();
    p.forcing = {};
    const PathSolution sol = p.solve(p.paths(1, 0));
    const EnergyReport e = energy_check(p.grid, sol, p.grid.zeros(), p.forcing, 0.0, 10.0);
    EXPECT_EQ(e.ratio, 0.0);
    EXPECT_EQ(e.multiplier_ratio, 0.0);
}

TEST(RateFitting, ExactPowerLaw) {
    const RateFit f = fit_rate({1.0, 0.5, 0.25, 0.125}, {3.0, 3.0 * 0.25, 3.0 * 0.0625, 3.0 * 0.015625});
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(std::exp(f.intercept), 3.0, 1e-12);
    EXPECT_NEAR(f.residual, 0.0, 1e-12);
    EXPECT_TRUE(std::isnan(f.slope_running[0]));
    for (std::size_t i = 1; i < 4; ++i) EXPECT_NEAR(f.slope_running[i], 2.0, 1e-12);
}

TEST(RateFitting, DegenerateAndMismatch) {
    const RateFit f = fit_rate({1.0, 0.1, 0.01}, {0.0, 0.0, 0.0});
    EXPECT_TRUE(f.degenerate);
    EXPECT_TRUE(std::isnan(f.slope));
    EXPECT_THROW(fit_rate({1.0}, {}), SizeMismatch);
}

TEST(RateStudies, CauchyValidation) {
    const Problem p = pinned_problem(15);
    const BrownianPathSet paths = p.paths(1, 0);
    EXPECT_THROW(cauchy_rate_study(p, {1e-2, 1e-3, 1e-4}, paths), ConfigError);
    EXPECT_THROW(cauchy_rate_study(p, {1e-2, 1e-3, 1e-3, 1e-5}, paths), ConfigError);
    EXPECT_THROW(cauchy_rate_study(p, {1e-2, 1e-3, 1e-5, 1e-6}, paths), ConfigError);
    EXPECT_THROW(cauchy_rate_study(p, {1e-2, 1e-3, 1e-4, -1e-5}, paths), ConfigError);
}

TEST(RateStudies, CauchyInactiveIsDegenerate) {
    Problem p = pinned_problem(15);
    p.forcing.amplitude = 1.0;
    const RateFit f = cauchy_rate_study(p, {1e-1, 1e-2, 1e-3, 1e-4}, p.paths(1, 0));
    EXPECT_TRUE(f.degenerate);
}

TEST(RateStudies, CauchyPinnedSlopeIsOne) {
    const Problem p = pinned_problem(31);
    const RateFit f = cauchy_rate_study(p, {1e-2, 1e-3, 1e-4, 1e-5}, p.paths(1, 0));
    EXPECT_FALSE(f.degenerate);
    EXPECT_NEAR(f.slope, 1.0, 0.1);
}

TEST(RateStudies, MeshSlopeIsTwo) {
    Problem p = pinned_problem();
    p.forcing = {};
    p.initial.kind = InitialKind::Sine;
    p.initial.amplitude = 1.0;
    p.tg = TimeGrid(0.05, 50);
    const RateFit f = mesh_rate_study(p, {7, 15, 31, 63}, p.paths(1, 0));
    EXPECT_EQ(f.params.size(), 3u);
    EXPECT_NEAR(f.params[0], 1.0 / 8.0, 1e-15);
    // Against the finest grid the error behaves like h^2 - h_fine^2.
    const double hf = 1.0 / 64.0;
    std::vector<double> model;
    for (double h : f.params) model.push_back(h * h - hf * hf);
    EXPECT_NEAR(f.slope, fit_rate(f.params, model).slope, 0.05);
    EXPECT_GT(f.slope, 1.9);
    EXPECT_THROW(mesh_rate_study(p, {7, 14, 29}, p.paths(1, 0)), ConfigError);
}

TEST(Ensemble, SummarizeFormula) {
    const FunctionalStats s = summarize("v", {1.0, 2.0, 3.0, 4.0});
    EXPECT_DOUBLE_EQ(s.mean, 2.5);
    EXPECT_DOUBLE_EQ(s.variance, 5.0 / 3.0);
    EXPECT_DOUBLE_EQ(s.ci_half_width, 1.96 * std::sqrt(5.0 / 12.0));
}

TEST(Ensemble, DeterministicProblemHasZeroVariance) {
    Problem p = pinned_problem(15);
    p.tg = TimeGrid(0.05, 20);
    const EnsembleStats st = ensemble_run(p, 5, 3, 10.0);
    EXPECT_EQ(st.n_paths, 5u);
    EXPECT_EQ(st.n_failures, 0u);
    for (const FunctionalStats& f : st.functionals) {
        EXPECT_LE(f.variance, 1e-24 * (1.0 + f.mean * f.mean)) << f.name;
    }
    EXPECT_EQ(st.functionals.size(), ensemble_functionals().size());
    EXPECT_THROW(st.get("nope"), ConfigError);
    EXPECT_THROW(ensemble_run(p, 1, 3, 10.0), ConfigError);
}

TEST(Ensemble, ResultIndependentOfWorkerCount) {
    const Problem p = noisy_problem();
    const EnsembleStats a = ensemble_run(p, 12, 17, 10.0, 1);
    const EnsembleStats b = ensemble_run(p, 12, 17, 10.0, 4);
    EXPECT_EQ(a.per_path, b.per_path);
    EXPECT_EQ(a.path_ids, b.path_ids);
    for (double r : a.column("energy_ratio")) EXPECT_LE(r, 10.0);
    EXPECT_GT(a.get("delta2").variance, 0.0);
}

TEST(Ensemble, FailedPathsAreCounted) {
    Problem p = noisy_problem();
    p.cfg.mu_cap = 0.05;
    const EnsembleStats st = ensemble_run(p, 10, 17, 10.0, 2);
    EXPECT_GT(st.n_failures, 0u);
    EXPECT_EQ(st.n_failures + st.n_paths, 10u);
    EXPECT_EQ(st.failure_messages.size(), st.n_failures);
    EXPECT_TRUE(st.failed());
}

TEST(Ensemble, NoiseStatisticsMatchBrownianMoments) {
    const TimeGrid tg(2.0, 200);
    const EnsembleStats st = noise_statistics(tg, 2, 4000, 9);
    const FunctionalStats& b1 = st.get("beta1_T2");
    EXPECT_NEAR(b1.mean, 2.0, 3.0 * std::sqrt(b1.variance / 4000.0));
    const FunctionalStats& d = st.get("delta2");
    EXPECT_GE(d.mean, 2.0);
    EXPECT_LE(d.mean, 4.0 * 2.0);
    EXPECT_THROW(noise_statistics(tg, 0, 10, 1), ConfigError);
}
