#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "svi/catalog.hpp"
#include "svi/errors.hpp"
#include "svi/grid.hpp"
#include "svi/implicit.hpp"
#include "svi/penalty.hpp"
#include "svi/random.hpp"
#include "svi/transform.hpp"

using namespace svi;

namespace {

Field random_field(std::size_t n, std::uint64_t seed, double scale = 1.0) {
    CounterStream rng(stream_key(seed, 17));
    Field f(n);
    for (double& v : f) v = scale * rng.normal();
    return f;
}

}  // namespace

TEST(Transform, RoundTrip) {
    const Field mu = random_field(50, 1, 2.0);
    const Field y = random_field(50, 2);
    const Field back = inverse(mu, forward(mu, y));
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(back[i], y[i], 1e-14 * (1.0 + std::abs(y[i])));
}

TEST(Transform, PreservesSign) {
    const Field mu = random_field(50, 3, 3.0);
    const Field y = random_field(50, 4);
    const Field x = forward(mu, y);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(std::signbit(x[i]), std::signbit(y[i]));
}

TEST(Transform, CapThrows) {
    Field mu(4, 0.0);
    mu[2] = 31.0;
    EXPECT_THROW(forward(mu, Field(4, 1.0)), NumericalFailure);
    EXPECT_NO_THROW(forward(mu, Field(4, 1.0), 40.0));
    mu[2] = std::nan("");
    EXPECT_THROW(inverse(mu, Field(4, 1.0), 40.0), NumericalFailure);
    EXPECT_THROW(forward(Field(3), Field(4)), SizeMismatch);
}

TEST(Transform, EffectiveReactionMatchesFormula) {
    const std::size_t n = 30;
    const Field mu = random_field(n, 5, 0.7);
    const Field mt = random_field(n, 6);
    VectorField grad{{random_field(n, 7), random_field(n, 8)}};
    const Field lap = random_field(n, 9);
    const Field y = random_field(n, 10);
    const ReactionSpec rs{ReactionKind::Saturating, 1.5};
    const Field out = effective_reaction(rs, mu, mt, grad, lap, 0.0, y);
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(mu[i]);
        const double c = mt[i] - grad[0][i] * grad[0][i] - grad[1][i] * grad[1][i] - lap[i];
        EXPECT_NEAR(out[i], 1.5 * std::tanh(e * y[i]) / e + c * y[i], 1e-12 * (1.0 + std::abs(out[i])));
    }
}

TEST(Transform, ReactionsVanishAtZeroAndAreLipschitz) {
    for (ReactionSpec rs : {ReactionSpec{}, ReactionSpec{ReactionKind::Linear, -2.0},
                            ReactionSpec{ReactionKind::Saturating, 3.0}}) {
        EXPECT_EQ(rs(0.0), 0.0);
        CounterStream rng(stream_key(11, 0));
        for (int i = 0; i < 200; ++i) {
            const double a = rng.normal(), b = rng.normal();
            EXPECT_LE(std::abs(rs(a) - rs(b)), std::abs(rs.alpha) * std::abs(a - b) + 1e-15);
        }
    }
}

TEST(Transform, EffectiveSourceScalesByExpMinusMu) {
    const Field mu = random_field(10, 12);
    const Field f = random_field(10, 13);
    const Field s = effective_source(mu, f);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_NEAR(s[i], std::exp(-mu[i]) * f[i], 1e-14);
}

TEST(Catalog, ParseAndNameRoundTrip) {
    for (ForcingKind k : {ForcingKind::Zero, ForcingKind::Constant, ForcingKind::Sine, ForcingKind::Bump,
                          ForcingKind::Halves, ForcingKind::BoundaryLayer}) {
        EXPECT_EQ(parse_forcing_kind(to_string(k)), k);
    }
    for (InitialKind k : {InitialKind::Zero, InitialKind::Sine, InitialKind::Cone, InitialKind::Cutoff,
                          InitialKind::Constant}) {
        EXPECT_EQ(parse_initial_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_forcing_kind("gaussian").has_value());
    // Nodal fields are built in code, never named in a config.
    EXPECT_FALSE(parse_forcing_kind("field").has_value());
}

TEST(Catalog, InitialDataValidated) {
    const Grid d = build_grid(1, {1.0}, 9, BoundaryKind::Dirichlet);
    InitialSpec c;
    c.kind = InitialKind::Constant;
    c.amplitude = 1.0;
    EXPECT_THROW(c.eval(d), ConfigError);
    const Grid n = build_grid(1, {1.0}, 9, BoundaryKind::Neumann);
    EXPECT_EQ(norm_max(c.eval(n)), 1.0);
    InitialSpec neg;
    neg.kind = InitialKind::Sine;
    neg.amplitude = -1.0;
    EXPECT_THROW(neg.eval(d), ConfigError);
    InitialSpec cone;
    cone.kind = InitialKind::Cone;
    cone.amplitude = 2.0;
    const Field x = cone.eval(d);
    EXPECT_NEAR(x[4], 2.0, 1e-12);
    for (double v : x) EXPECT_GE(v, 0.0);
}

TEST(Catalog, ForcingTimeModulation) {
    const Grid g = build_grid(1, {1.0}, 5, BoundaryKind::Dirichlet);
    ForcingSpec f;
    f.kind = ForcingKind::Halves;
    f.amplitude = 2.0;
    f.secondary = -3.0;
    const Field v = f.eval(g, 0.0);
    EXPECT_EQ(v[0], 2.0);
    EXPECT_EQ(v[4], -3.0);
    f.omega = 2.0;
    EXPECT_TRUE(f.time_dependent());
    EXPECT_NEAR(f.eval(g, 0.5)[0], 2.0 * std::cos(1.0), 1e-14);
}

TEST(Implicit, SolveInvertsApply) {
    for (int dim : {1, 2}) {
        for (BoundaryKind bc : {BoundaryKind::Dirichlet, BoundaryKind::Neumann}) {
            const Grid g = dim == 1 ? build_grid(1, {1.0}, 40, bc) : build_grid(2, {1.0, 0.7}, 14, bc);
            const ImplicitOperator op(g, 0.01);
            const Field rhs = random_field(g.size(), 20 + dim);
            Field shift(g.size());
            CounterStream rng(stream_key(30, dim));
            for (double& s : shift) s = rng.uniform() < 0.3 ? 100.0 * rng.uniform() : 0.0;
            const Field y = op.solve(shift.span(), rhs);
            const Field back = op.apply(shift.span(), y);
            for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(back[i], rhs[i], 1e-9);
        }
    }
}

TEST(Implicit, ApplyMatchesLaplacian) {
    const Grid g = build_grid(2, {1.0, 1.0}, 9, BoundaryKind::Neumann);
    const ImplicitOperator op(g, 0.3);
    const Field y = random_field(g.size(), 40);
    const Field lap = apply_laplacian(g, y);
    const Field a = op.apply(Field(g.size()).span(), y);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a[i], y[i] - 0.3 * lap[i], 1e-10);
}

TEST(Implicit, PenalizedNewtonMatchesScalarOracle) {
    // With c = 0 the system decouples: y + (penalty/eps) min(y, 0) = rhs.
    const Grid g = build_grid(1, {1.0}, 12, BoundaryKind::Dirichlet);
    const ImplicitOperator op(g, 0.0);
    const Field rhs = random_field(g.size(), 50);
    const Field fixed(g.size());
    const Field penalty(g.size(), 0.5);
    const double eps = 1e-3;
    const NewtonResult r = solve_penalized(op, fixed.span(), penalty.span(), eps, rhs, g.zeros(), 1e-12, 50);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double expect = rhs[i] >= 0.0 ? rhs[i] : rhs[i] / (1.0 + 0.5 / eps);
        EXPECT_NEAR(r.y[i], expect, 1e-13);
    }
}

TEST(Implicit, PenalizedResidualIsSmall) {
    const Grid g = build_grid(2, {1.0, 1.0}, 15, BoundaryKind::Dirichlet);
    const ImplicitOperator op(g, 1e-3);
    const Field rhs = random_field(g.size(), 60);
    const Field fixed(g.size());
    const Field penalty(g.size(), 1e-3);
    const double eps = 1e-5;
    const NewtonResult r = solve_penalized(op, fixed.span(), penalty.span(), eps, rhs, g.zeros(), 1e-10, 100);
    Field res = op.apply(fixed.span(), r.y);
    for (std::size_t i = 0; i < g.size(); ++i) res[i] += 1e-3 * beta_eps(r.y[i], eps) - rhs[i];
    EXPECT_LT(norm_max(res), 1e-8 * (1.0 + norm_max(rhs)));
}
