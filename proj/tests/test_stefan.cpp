#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "svi/errors.hpp"
#include "svi/stefan.hpp"

using namespace svi;

namespace {

Trajectory synthetic(const Grid& g, const TimeGrid& tg, const std::function<double(double, double, double)>& fn) {
    Trajectory tr;
    for (std::size_t n = 0; n <= tg.steps(); ++n) {
        const double t = tg.time(n);
        tr.times.push_back(t);
        tr.slices.push_back(g.sample([&](double x, double y) { return fn(t, x, y); }));
    }
    return tr;
}

}  // namespace

TEST(StefanData, ValidatesInputs) {
    const Grid g = build_grid(1, {1.0}, 9, BoundaryKind::Dirichlet);
    EXPECT_THROW(make_stefan_data(g, g.zeros(), 0.0), ConfigError);
    EXPECT_THROW(make_stefan_data(g, g.zeros(), 1.0, -1.0), ConfigError);
    Field neg = g.zeros();
    neg[3] = -0.1;
    EXPECT_THROW(make_stefan_data(g, neg, 1.0), ConfigError);
    const Grid g2 = build_grid(2, {1.0, 1.0}, 5, BoundaryKind::Dirichlet);
    EXPECT_THROW(make_stefan_data(g2, g2.zeros(), 1.0, 1.0), ConfigError);
    EXPECT_THROW(make_stefan_data(g, Field(4), 1.0), SizeMismatch);
}

TEST(StefanData, SourceSplitsOnInitialLiquid) {
    const Grid g = build_grid(1, {1.0}, 5, BoundaryKind::Dirichlet);
    Field theta0 = g.zeros();
    theta0[2] = 0.7;
    const StefanData sd = make_stefan_data(g, theta0, 2.5);
    const Field f0 = build_svi_source(sd, g);
    EXPECT_EQ(f0[2], 0.7);
    EXPECT_EQ(f0[0], -2.5);
    EXPECT_EQ(f0[4], -2.5);
    EXPECT_EQ(sd.o0_mask[2], 1);
    EXPECT_EQ(sd.o0_mask[1], 0);
}

TEST(Similarity, RootSatisfiesTranscendentalEquation) {
    for (double st : {0.01, 0.3, 1.0, 5.0}) {
        const SimilaritySolution s = similarity_oracle(st, 0.25);
        const double l = s.lambda;
        EXPECT_NEAR(l * std::exp(l * l) * std::erf(l), st / std::sqrt(std::numbers::pi), 1e-12);
        EXPECT_LT(s.residual, 1e-10);
        EXPECT_NEAR(s.front, 2.0 * l * 0.5, 1e-15);
        EXPECT_NEAR(s.profile(0.0), 1.0, 1e-15);
        EXPECT_NEAR(s.profile(s.front * (1.0 - 1e-9)), 0.0, 1e-8);
        EXPECT_EQ(s.profile(2.0 * s.front), 0.0);
    }
}

TEST(Similarity, FrontScalesWithSquareRootOfTime) {
    const SimilaritySolution a = similarity_oracle(1.0, 0.1);
    const SimilaritySolution b = similarity_oracle(1.0, 0.4);
    EXPECT_NEAR(b.front, 2.0 * a.front, 1e-14);
    EXPECT_EQ(a.lambda, b.lambda);
}

TEST(Similarity, SmallStefanNumberAsymptotics) {
    // lambda^2 (2 / sqrt(pi)) ~ St / sqrt(pi) as St -> 0.
    const SimilaritySolution s = similarity_oracle(1e-6, 1.0);
    EXPECT_NEAR(s.lambda / std::sqrt(0.5e-6), 1.0, 1e-5);
}

TEST(Similarity, RejectsBadArguments) {
    EXPECT_THROW(similarity_oracle(0.0, 1.0), ConfigError);
    EXPECT_THROW(similarity_oracle(1.0, -1.0), ConfigError);
    EXPECT_THROW(similarity_oracle(1e200, 1.0), ConfigError);
}

TEST(FreeBoundary, LinearRampFrontIsInterpolated) {
    const Grid g = build_grid(1, {1.0}, 99, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.5, 10);
    const double tol = 1e-3;
    const Trajectory y = synthetic(g, tg, [](double t, double x, double) { return std::max(t - x, 0.0); });
    const FreeBoundary fb = extract_free_boundary(g, y, tol);
    ASSERT_EQ(fb.front.size(), 11u);
    EXPECT_EQ(fb.front[0], 0.0);
    for (std::size_t n = 1; n <= 10; ++n) {
        EXPECT_NEAR(fb.front[n], tg.time(n) - tol, g.spacing(0));
        EXPECT_EQ(fb.components[n], 1u);
    }
    EXPECT_TRUE(fb.monotone());
    EXPECT_FALSE(fb.empty());
    EXPECT_EQ(fb.first_melted[0], 1);
    EXPECT_EQ(fb.first_melted[98], -1);
}

TEST(FreeBoundary, ExactWhenCrossingIsInsideTheRamp) {
    const Grid g = build_grid(1, {1.0}, 19, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 1);
    // Linear on the whole interval; the crossing of 0.3 sits at xi = 0.5.
    const Trajectory y = synthetic(g, tg, [](double t, double x, double) { return t * (0.8 - x); });
    const FreeBoundary fb = extract_free_boundary(g, y, 0.3);
    EXPECT_NEAR(fb.front[1], 0.5, 1e-12);
}

TEST(FreeBoundary, RetreatIsNotMonotone) {
    const Grid g = build_grid(1, {1.0}, 49, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 4);
    const Trajectory y = synthetic(g, tg, [](double t, double x, double) { return std::max(0.5 - std::abs(t - 0.5) - x, 0.0); });
    EXPECT_FALSE(extract_free_boundary(g, y, 1e-6).monotone());
}

TEST(FreeBoundary, SeedsSelectComponent) {
    const Grid g = build_grid(1, {1.0}, 99, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 2);
    const Trajectory y = synthetic(g, tg, [](double t, double x, double) {
        return t * (std::max(0.1 - std::abs(x - 0.2), 0.0) + std::max(0.1 - std::abs(x - 0.7), 0.0));
    });
    const FreeBoundary all = extract_free_boundary(g, y, 1e-6);
    EXPECT_EQ(all.components[2], 2u);
    EXPECT_NEAR(all.front[2], 0.8, 0.011);
    std::vector<char> seeds(g.size(), 0);
    seeds[19] = 1;
    const FreeBoundary left = extract_free_boundary(g, y, 1e-6, seeds);
    EXPECT_NEAR(left.front[2], 0.3, 0.011);
    EXPECT_NEAR(left.melted_measure[2], all.melted_measure[2], 1e-15);
}

TEST(FreeBoundary, DiscAreaGivesRadius) {
    const Grid g = build_grid(2, {1.0, 1.0}, 199, BoundaryKind::Dirichlet);
    const TimeGrid tg(1.0, 1);
    const Trajectory y = synthetic(g, tg, [](double t, double x, double z) {
        return t * std::max(0.09 - (x - 0.5) * (x - 0.5) - (z - 0.5) * (z - 0.5), 0.0);
    });
    const FreeBoundary fb = extract_free_boundary(g, y, 1e-12);
    EXPECT_NEAR(fb.front[1], 0.3, 0.01);
    EXPECT_NEAR(fb.melted_measure[1], std::numbers::pi * 0.09, 0.01);
}

TEST(Baiocchi, ZeroTemperatureGivesZero) {
    const Grid g = build_grid(1, {1.0}, 9, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 5);
    const Trajectory zero = synthetic(g, tg, [](double, double, double) { return 0.0; });
    const FreeBoundary fb = extract_free_boundary(g, zero, 1e-6);
    const Trajectory y = baiocchi_forward(zero, fb, g, tg, std::vector<char>(g.size(), 1));
    for (const Field& s : y.slices) EXPECT_EQ(norm_max(s), 0.0);
}

TEST(Baiocchi, ConstantTemperatureOnLiquidIntegratesToTime) {
    const Grid g = build_grid(1, {1.0}, 9, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 5);
    const Trajectory one = synthetic(g, tg, [](double, double, double) { return 1.0; });
    const Trajectory none = synthetic(g, tg, [](double, double, double) { return 0.0; });
    const FreeBoundary fb = extract_free_boundary(g, none, 1e-6);
    std::vector<char> mask(g.size(), 0);
    mask[4] = 1;
    const Trajectory y = baiocchi_forward(one, fb, g, tg, mask);
    for (std::size_t n = 0; n <= 5; ++n) {
        EXPECT_NEAR(y[n][4], tg.time(n), 1e-15);
        EXPECT_EQ(y[n][3], 0.0);
    }
    Trajectory mu = synthetic(g, tg, [](double, double, double) { return std::log(2.0); });
    const Trajectory half = baiocchi_forward(one, fb, g, tg, mask, mu);
    EXPECT_NEAR(half.back()[4], 0.05, 1e-15);
}

TEST(StefanSolve, WallMeltingTracksSimilarityFront) {
    const Grid g = build_grid(1, {1.0}, 150, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.1, 500);
    SolveConfig cfg;
    cfg.eps = 1e-7;
    const StefanData sd = make_stefan_data(g, g.zeros(), 1.0, 1.0);
    const StefanSolution s = solve_stefan_svi(g, tg, CoeffSpec{}, sd, cfg, sample_paths(tg, 0, 1, 0));
    const SimilaritySolution oracle = similarity_oracle(1.0, 0.1);
    EXPECT_NEAR(s.fb.front.back() / oracle.front, 1.0, 0.03);
    EXPECT_TRUE(s.fb.monotone());
    // In the solid y is of size eps, so the residual is bounded by the discrete Laplacian
    // of an eps-sized field across the front.
    const double h = g.spacing(0);
    EXPECT_LT(s.source_residual, 4.0 * cfg.eps / (h * h));
    const double tol = s.fb.tol;
    for (std::size_t n = 1; n < s.theta.size(); ++n) {
        for (std::size_t k = 0; k < g.size(); ++k) {
            EXPECT_GE(s.theta[n][k], -tol / tg.dt());
            if (s.sol.y[n][k] > 10.0 * tol && g.coord(k, 0) < 0.5 * s.fb.front[n]) EXPECT_GT(s.theta[n][k], 0.0);
        }
    }
    // Temperature near the wall against the similarity profile.
    const double xi = g.coord(9, 0);
    EXPECT_NEAR(s.theta.back()[9], oracle.profile(xi), 0.03);
    // Forward map returns the solved y up to one step of temperature.
    const Trajectory back = baiocchi_forward(s.theta, s.fb, g, tg);
    double worst = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) worst = std::max(worst, std::abs(back.back()[k] - s.sol.y.back()[k]));
    EXPECT_LT(worst, tg.dt());
}

TEST(StefanSolve, LiquidPocketMeltsMonotonically) {
    const Grid g = build_grid(1, {1.0}, 120, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.05, 200);
    InitialSpec cone;
    cone.kind = InitialKind::Cone;
    cone.amplitude = 4.0;
    cone.radius = 0.1;
    const StefanData sd = make_stefan_data(g, cone.eval(g), 1.0);
    SolveConfig cfg;
    cfg.eps = 1e-6;
    CoeffTerm t;
    t.amplitude = 0.3;
    t.space.kind = SpaceKind::Sine;
    const CoeffSpec cs{{t}};
    for (std::uint64_t id = 0; id < 3; ++id) {
        const StefanSolution s = solve_stefan_svi(g, tg, cs, sd, cfg, sample_paths(tg, 1, 41, id));
        EXPECT_TRUE(s.fb.monotone()) << "path " << id;
        EXPECT_GT(s.fb.front.back(), s.fb.front[1]) << "path " << id;
        for (const Field& y : s.sol.y.slices) {
            for (double v : y) EXPECT_GE(v, -1e-5);
        }
    }
}

TEST(StefanSolve, ColdSolidStaysSolid) {
    const Grid g = build_grid(2, {1.0, 1.0}, 15, BoundaryKind::Dirichlet);
    const TimeGrid tg(0.05, 20);
    const StefanData sd = make_stefan_data(g, g.zeros(), 1.0);
    const StefanSolution s = solve_stefan_svi(g, tg, CoeffSpec{}, sd, SolveConfig{}, sample_paths(tg, 0, 1, 0));
    EXPECT_TRUE(s.fb.empty());
    for (double r : s.fb.front) EXPECT_EQ(r, 0.0);
}
