#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "svi/errors.hpp"
#include "svi/noise.hpp"

using namespace svi;

TEST(TimeGrid, StepsAndTimes) {
    const TimeGrid tg = TimeGrid::from_step(0.1, 1e-3);
    EXPECT_EQ(tg.steps(), 100u);
    EXPECT_DOUBLE_EQ(tg.time(100), 0.1);
    EXPECT_NEAR(tg.dt() * static_cast<double>(tg.steps()), 0.1, 1e-15);
    EXPECT_EQ(tg.halved().steps(), 200u);
}

TEST(BrownianPaths, ReproducibleAndOrderIndependent) {
    const TimeGrid tg(1.0, 64);
    const BrownianPathSet a = sample_paths(tg, 2, 9, 3);
    sample_paths(tg, 2, 9, 7);
    const BrownianPathSet b = sample_paths(tg, 2, 9, 3);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t n = 0; n < tg.steps(); ++n) EXPECT_EQ(a.increment(k, n), b.increment(k, n));
    }
    const BrownianPathSet c = sample_paths(tg, 2, 9, 4);
    EXPECT_NE(a.increment(0, 0), c.increment(0, 0));
    EXPECT_NE(a.increment(0, 0), a.increment(1, 0));
}

TEST(BrownianPaths, ValuesAreCumulativeIncrements) {
    const TimeGrid tg(0.5, 40);
    const BrownianPathSet p = sample_paths(tg, 1, 1, 0);
    EXPECT_EQ(p.value(0, 0), 0.0);
    double sum = 0.0;
    for (std::size_t n = 0; n < tg.steps(); ++n) {
        sum += p.increment(0, n);
        EXPECT_NEAR(p.value(0, n + 1), sum, 1e-14);
    }
}

TEST(BrownianPaths, IncrementMomentsMatchDt) {
    const TimeGrid tg(1.0, 100);
    double mean = 0.0, second = 0.0;
    std::size_t count = 0;
    for (std::uint64_t id = 0; id < 400; ++id) {
        const BrownianPathSet p = sample_paths(tg, 1, 2, id);
        for (double d : p.increments(0)) {
            mean += d;
            second += d * d;
            ++count;
        }
    }
    mean /= static_cast<double>(count);
    second /= static_cast<double>(count);
    const double dt = tg.dt();
    EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(dt / static_cast<double>(count)));
    EXPECT_NEAR(second / dt, 1.0, 4.0 * std::sqrt(2.0 / static_cast<double>(count)));
}

TEST(BrownianPaths, BridgeRefinementKeepsCoarseValues) {
    const TimeGrid tg(1.0, 16);
    const BrownianPathSet p = sample_paths(tg, 2, 5, 1);
    const BrownianPathSet r = refine_paths(p);
    EXPECT_EQ(r.time_grid().steps(), 32u);
    EXPECT_EQ(r.refinement(), 1);
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t n = 0; n <= 16; ++n) EXPECT_NEAR(r.value(k, 2 * n), p.value(k, n), 1e-14);
    }
    const BrownianPathSet r2 = refine_paths(p);
    EXPECT_EQ(r.value(0, 1), r2.value(0, 1));
}

TEST(BrownianPaths, BridgeMidpointsHaveConditionalVariance) {
    const TimeGrid tg(1.0, 8);
    double second = 0.0;
    std::size_t count = 0;
    for (std::uint64_t id = 0; id < 2000; ++id) {
        const BrownianPathSet p = sample_paths(tg, 1, 11, id);
        const BrownianPathSet r = refine_paths(p);
        for (std::size_t n = 0; n < 8; ++n) {
            const double dev = r.value(0, 2 * n + 1) - 0.5 * (p.value(0, n) + p.value(0, n + 1));
            second += dev * dev;
            ++count;
        }
    }
    // Bridge midpoint variance dt / 4.
    EXPECT_NEAR(second / static_cast<double>(count) / (tg.dt() / 4.0), 1.0, 0.06);
}

TEST(BrownianPaths, PathSupIsLargestAbsoluteValue) {
    const TimeGrid tg(1.0, 50);
    const BrownianPathSet p = sample_paths(tg, 3, 8, 2);
    double sup = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        for (double v : p.values(k)) sup = std::max(sup, std::abs(v));
    }
    EXPECT_EQ(path_sup(p), sup);
}

TEST(Coefficients, TimeFactorDerivativeMatchesDifferenceQuotient) {
    for (TimeFactor tf : {TimeFactor{TimeKind::Constant, 0, 0}, TimeFactor{TimeKind::Linear, 0.3, -2.0},
                          TimeFactor{TimeKind::Cosine, 3.0, 0.4}}) {
        const double t = 0.37, h = 1e-6;
        EXPECT_NEAR(tf.derivative(t), (tf.value(t + h) - tf.value(t - h)) / (2 * h), 1e-7);
    }
}

TEST(Coefficients, SpaceFactorDerivativesMatchDifferences) {
    SpaceFactor sf;
    sf.kind = SpaceKind::Sine;
    sf.mode = 2;
    SpaceFactor poly;
    poly.kind = SpaceKind::Polynomial;
    poly.poly = {1.0, -0.5, 2.0};
    for (const SpaceFactor& f : {sf, poly}) {
        const std::array<double, 2> L{1.0, 2.0};
        const std::array<double, 2> x{0.3, 0.7};
        const double h = 1e-4;
        const auto s = f.eval(2, L, x);
        const auto px = f.eval(2, L, {x[0] + h, x[1]});
        const auto mx = f.eval(2, L, {x[0] - h, x[1]});
        const auto py = f.eval(2, L, {x[0], x[1] + h});
        const auto my = f.eval(2, L, {x[0], x[1] - h});
        EXPECT_NEAR(s.grad[0], (px.value - mx.value) / (2 * h), 1e-6);
        EXPECT_NEAR(s.grad[1], (py.value - my.value) / (2 * h), 1e-6);
        EXPECT_NEAR(s.lap, (px.value + mx.value + py.value + my.value - 4 * s.value) / (h * h), 1e-4);
    }
}

TEST(Coefficients, ConstantMuGivesHalfSquareCorrection) {
    const Grid g = build_grid(1, {1.0}, 7, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 10);
    CoeffTerm t;
    t.amplitude = 0.8;
    const CoeffSpec cs{{t}};
    const BrownianPathSet p = sample_paths(tg, 1, 3, 0);
    const Field mu = eval_mu(cs, p, 5, g);
    const Field mt = eval_mu_tilde(cs, p, 5, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        EXPECT_NEAR(mu[k], 0.8 * p.value(0, 5), 1e-15);
        EXPECT_NEAR(mt[k], 0.32, 1e-15);
    }
    const MuDerivatives d = eval_mu_derivs(cs, p, 5, g);
    EXPECT_EQ(norm_max(d.g[0]), 0.0);
    EXPECT_EQ(norm_max(d.lap_mu), 0.0);
}

TEST(Coefficients, ItoCorrectionIncludesTimeDerivative) {
    const Grid g = build_grid(1, {1.0}, 5, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 10);
    CoeffTerm t;
    t.amplitude = 2.0;
    t.time = {TimeKind::Linear, 1.0, 3.0};
    t.space.kind = SpaceKind::Sine;
    const CoeffSpec cs{{t}};
    const BrownianPathSet p = sample_paths(tg, 1, 6, 0);
    const std::size_t n = 4;
    const double time = tg.time(n);
    const Field mt = eval_mu_tilde(cs, p, n, g);
    const MuDerivatives d = eval_mu_derivs(cs, p, n, g);
    for (std::size_t k = 0; k < g.size(); ++k) {
        const double b = std::sin(std::numbers::pi * g.coord(k, 0));
        const double mu_k = 2.0 * (1.0 + 3.0 * time) * b;
        EXPECT_NEAR(mt[k], 2.0 * 3.0 * b * p.value(0, n) + 0.5 * mu_k * mu_k, 1e-12);
        const double grad = 2.0 * (1.0 + 3.0 * time) * std::numbers::pi * std::cos(std::numbers::pi * g.coord(k, 0)) * p.value(0, n);
        EXPECT_NEAR(d.grad_mu[0][k], grad, 1e-12);
        EXPECT_NEAR(d.g[0][k], -2.0 * grad, 1e-12);
    }
}

TEST(Coefficients, MismatchedPathCountThrows) {
    const Grid g = build_grid(1, {1.0}, 5, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 10);
    const CoeffSpec cs{{CoeffTerm{}, CoeffTerm{}}};
    EXPECT_THROW(eval_mu(cs, sample_paths(tg, 1, 1, 0), 0, g), SizeMismatch);
}
