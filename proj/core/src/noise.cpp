#include "svi/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "svi/errors.hpp"
#include "svi/random.hpp"

namespace svi {

namespace {

constexpr std::uint64_t kRefineTag = 0x5246494E45ULL;  // "RFINE"

std::vector<double> cumulative(std::span<const double> inc) {
    std::vector<double> v(inc.size() + 1, 0.0);
    for (std::size_t n = 0; n < inc.size(); ++n) v[n + 1] = v[n] + inc[n];
    return v;
}

void require_m(const CoeffSpec& cs, const BrownianPathSet& paths) {
    if (cs.m() != paths.m()) {
        throw SizeMismatch("coefficient count " + std::to_string(cs.m()) +
                           " does not match Brownian motion count " + std::to_string(paths.m()));
    }
}

}  // namespace

TimeGrid::TimeGrid(double horizon, std::size_t steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("time grid: T must be > 0");
    if (steps < 1) throw ConfigError("time grid: N must be >= 1");
}

TimeGrid TimeGrid::from_step(double horizon, double dt) {
    if (!(dt > 0.0)) throw ConfigError("time grid: dt must be > 0");
    const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
    return TimeGrid(horizon, std::max<std::size_t>(n, 1));
}

BrownianPathSet::BrownianPathSet(TimeGrid tg, std::size_t m, std::uint64_t seed, std::uint64_t path_id,
                                 std::vector<std::vector<double>> increments)
    : tg_(tg), seed_(seed), path_id_(path_id), increments_(std::move(increments)) {
    if (increments_.size() != m) throw SizeMismatch("BrownianPathSet: increment table has wrong m");
    values_.reserve(m);
    for (const auto& inc : increments_) {
        if (inc.size() != tg_.steps()) throw SizeMismatch("BrownianPathSet: increment count != N");
        values_.push_back(cumulative(inc));
    }
}

BrownianPathSet sample_paths(const TimeGrid& tg, std::size_t m, std::uint64_t seed, std::uint64_t path_id) {
    const double sd = std::sqrt(tg.dt());
    std::vector<std::vector<double>> inc(m, std::vector<double>(tg.steps()));
    for (std::size_t k = 0; k < m; ++k) {
        CounterStream rng(stream_key(seed, path_id, k));
        for (double& d : inc[k]) d = sd * rng.normal();
    }
    return BrownianPathSet(tg, m, seed, path_id, std::move(inc));
}

BrownianPathSet refine_paths(const BrownianPathSet& paths) {
    const TimeGrid fine = paths.time_grid().halved();
    const double half_sd = 0.5 * std::sqrt(paths.time_grid().dt());
    const int level = paths.refinement() + 1;
    std::vector<std::vector<double>> inc(paths.m(), std::vector<double>(fine.steps()));
    for (std::size_t k = 0; k < paths.m(); ++k) {
        CounterStream rng(stream_key(paths.seed(), paths.path_id(), k, kRefineTag + level));
        for (std::size_t n = 0; n < paths.time_grid().steps(); ++n) {
            const double coarse = paths.increment(k, n);
            const double z = half_sd * rng.normal();
            inc[k][2 * n] = 0.5 * coarse + z;
            inc[k][2 * n + 1] = 0.5 * coarse - z;
        }
    }
    BrownianPathSet out(fine, paths.m(), paths.seed(), paths.path_id(), std::move(inc));
    out.refinement_ = level;
    return out;
}

double path_sup(const BrownianPathSet& paths) {
    double s = 0.0;
    for (std::size_t k = 0; k < paths.m(); ++k) {
        for (double v : paths.values(k)) s = std::max(s, std::abs(v));
    }
    return s;
}

double TimeFactor::value(double t) const {
    switch (kind) {
        case TimeKind::Constant: return 1.0;
        case TimeKind::Linear: return c0 + c1 * t;
        case TimeKind::Cosine: return std::cos(c0 * t + c1);
    }
    return 0.0;
}

double TimeFactor::derivative(double t) const {
    switch (kind) {
        case TimeKind::Constant: return 0.0;
        case TimeKind::Linear: return c1;
        case TimeKind::Cosine: return -c0 * std::sin(c0 * t + c1);
    }
    return 0.0;
}

SpaceFactor::Sample SpaceFactor::eval(const Grid& grid, std::size_t node) const {
    return eval(grid.dim(), {grid.length(0), grid.length(1)}, grid.point(node));
}

SpaceFactor::Sample SpaceFactor::eval(int dim, std::array<double, 2> lengths, std::array<double, 2> xi) const {
    // Per-axis profile value, first and second derivative.
    std::array<std::array<double, 3>, 2> p{};
    for (int a = 0; a < dim; ++a) {
        const double s = xi[a];
        switch (kind) {
            case SpaceKind::Constant: p[a] = {1.0, 0.0, 0.0}; break;
            case SpaceKind::Polynomial:
                p[a] = {poly[0] + poly[1] * s + poly[2] * s * s, poly[1] + 2.0 * poly[2] * s, 2.0 * poly[2]};
                break;
            case SpaceKind::Sine: {
                const double w = mode * std::numbers::pi / lengths[a];
                p[a] = {std::sin(w * s), w * std::cos(w * s), -w * w * std::sin(w * s)};
                break;
            }
            case SpaceKind::Cosine: {
                const double w = mode * std::numbers::pi / lengths[a];
                p[a] = {std::cos(w * s), -w * std::sin(w * s), -w * w * std::cos(w * s)};
                break;
            }
        }
    }
    if (dim == 1) return {p[0][0], {p[0][1], 0.0}, p[0][2]};
    return {p[0][0] * p[1][0],
            {p[0][1] * p[1][0], p[0][0] * p[1][1]},
            p[0][2] * p[1][0] + p[0][0] * p[1][2]};
}

Field eval_mu_k(const CoeffSpec& cs, std::size_t k, double t, const Grid& grid) {
    const CoeffTerm& term = cs.terms.at(k);
    const double a = term.amplitude * term.time.value(t);
    Field out(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] = a * term.space.eval(grid, i).value;
    return out;
}

Field eval_mu(const CoeffSpec& cs, const BrownianPathSet& paths, std::size_t n, const Grid& grid) {
    require_m(cs, paths);
    const double t = paths.time_grid().time(n);
    Field out(grid.size());
    for (std::size_t k = 0; k < cs.m(); ++k) {
        const CoeffTerm& term = cs.terms[k];
        const double scale = term.amplitude * term.time.value(t) * paths.value(k, n);
        if (scale == 0.0) continue;
        for (std::size_t i = 0; i < grid.size(); ++i) out[i] += scale * term.space.eval(grid, i).value;
    }
    return out;
}

Field eval_mu_tilde(const CoeffSpec& cs, const BrownianPathSet& paths, std::size_t n, const Grid& grid) {
    require_m(cs, paths);
    const double t = paths.time_grid().time(n);
    Field out(grid.size());
    for (std::size_t k = 0; k < cs.m(); ++k) {
        const CoeffTerm& term = cs.terms[k];
        const double a = term.amplitude * term.time.value(t);
        const double da = term.amplitude * term.time.derivative(t);
        const double beta = paths.value(k, n);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double b = term.space.eval(grid, i).value;
            const double mu_k = a * b;
            out[i] += da * b * beta + 0.5 * mu_k * mu_k;
        }
    }
    return out;
}

MuDerivatives eval_mu_derivs(const CoeffSpec& cs, const BrownianPathSet& paths, std::size_t n,
                             const Grid& grid) {
    require_m(cs, paths);
    const double t = paths.time_grid().time(n);
    const auto dim = static_cast<std::size_t>(grid.dim());
    MuDerivatives d;
    d.grad_mu.components.assign(dim, Field(grid.size()));
    d.lap_mu = Field(grid.size());
    for (std::size_t k = 0; k < cs.m(); ++k) {
        const CoeffTerm& term = cs.terms[k];
        const double scale = term.amplitude * term.time.value(t) * paths.value(k, n);
        if (scale == 0.0) continue;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto s = term.space.eval(grid, i);
            for (std::size_t a = 0; a < dim; ++a) d.grad_mu[a][i] += scale * s.grad[a];
            d.lap_mu[i] += scale * s.lap;
        }
    }
    d.g = d.grad_mu;
    for (auto& comp : d.g.components) {
        for (double& v : comp) v *= -2.0;
    }
    return d;
}

}  // namespace svi
