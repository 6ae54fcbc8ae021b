#include "svi/stefan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "svi/errors.hpp"
#include "svi/penalty.hpp"

namespace svi {

StefanData make_stefan_data(const Grid& grid, Field theta0, double rho, double wall_temperature) {
    require_matches(grid, theta0, "stefan.theta0");
    if (!(rho > 0.0)) throw ConfigError("stefan.rho must be > 0");
    if (!(wall_temperature >= 0.0)) throw ConfigError("stefan.wall_temperature must be >= 0");
    if (wall_temperature > 0.0 && (grid.dim() != 1 || grid.bc() != BoundaryKind::Dirichlet)) {
        throw ConfigError("stefan.wall_temperature needs a 1D Dirichlet grid");
    }
    StefanData sd;
    sd.o0_mask.resize(theta0.size());
    for (std::size_t k = 0; k < theta0.size(); ++k) {
        if (!(theta0[k] >= 0.0)) throw ConfigError("stefan.theta0 must be >= 0 everywhere");
        sd.o0_mask[k] = theta0[k] > 0.0;
    }
    sd.theta0 = std::move(theta0);
    sd.rho = rho;
    sd.wall_temperature = wall_temperature;
    return sd;
}

Field build_svi_source(const StefanData& sd, const Grid& grid) {
    require_matches(grid, sd.theta0, "build_svi_source");
    Field f(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) f[k] = sd.o0_mask[k] ? sd.theta0[k] : -sd.rho;
    return f;
}

bool FreeBoundary::empty() const {
    return std::none_of(melted.begin(), melted.end(), [](const std::vector<char>& m) {
        return std::any_of(m.begin(), m.end(), [](char c) { return c != 0; });
    });
}

bool FreeBoundary::monotone(double tol_front) const {
    for (std::size_t n = 1; n < front.size(); ++n) {
        if (front[n] < front[n - 1] - tol_front) return false;
        for (std::size_t k = 0; k < melted[n].size(); ++k) {
            if (melted[n - 1][k] && !melted[n][k]) return false;
        }
    }
    return true;
}

namespace {

// Component labels of the melted set (4-neighbour connectivity), -1 for solid nodes.
std::size_t label_components(const Grid& grid, const std::vector<char>& melted, std::vector<long>& label) {
    label.assign(melted.size(), -1);
    std::size_t count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < melted.size(); ++start) {
        if (!melted[start] || label[start] >= 0) continue;
        label[start] = static_cast<long>(count);
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            for (int a = 0; a < grid.dim(); ++a) {
                const std::size_t i = grid.axis_index(k, a);
                const std::size_t s = grid.stride(a);
                auto visit = [&](std::size_t q) {
                    if (melted[q] && label[q] < 0) {
                        label[q] = static_cast<long>(count);
                        stack.push_back(q);
                    }
                };
                if (i > 0) visit(k - s);
                if (i + 1 < grid.count(a)) visit(k + s);
            }
        }
        ++count;
    }
    return count;
}

double mu_at(const CoeffSpec& cs, const BrownianPathSet& paths, std::size_t n, const Grid& grid,
             std::array<double, 2> xi) {
    const double t = paths.time_grid().time(n);
    const std::array<double, 2> lengths{grid.length(0), grid.dim() == 2 ? grid.length(1) : 0.0};
    double mu = 0.0;
    for (std::size_t k = 0; k < cs.m(); ++k) {
        const CoeffTerm& term = cs.terms[k];
        mu += term.amplitude * term.time.value(t) * term.space.eval(grid.dim(), lengths, xi).value * paths.value(k, n);
    }
    return mu;
}

}  // namespace

FreeBoundary extract_free_boundary(const Grid& grid, const Trajectory& y, double tol,
                                   const std::vector<char>& seeds) {
    if (!seeds.empty() && seeds.size() != grid.size()) throw SizeMismatch("extract_free_boundary: seed mask size");
    const bool seeded = std::any_of(seeds.begin(), seeds.end(), [](char c) { return c != 0; });
    FreeBoundary fb;
    fb.tol = tol;
    fb.times = y.times;
    fb.first_melted.assign(grid.size(), -1);
    std::vector<long> label;
    for (std::size_t n = 0; n < y.size(); ++n) {
        const Field& yn = y[n];
        require_matches(grid, yn, "extract_free_boundary");
        std::vector<char> melted(grid.size());
        double measure = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            melted[k] = yn[k] > tol;
            if (melted[k]) {
                measure += grid.weight(k);
                if (fb.first_melted[k] < 0) fb.first_melted[k] = static_cast<long>(n);
            }
        }
        const std::size_t ncomp = label_components(grid, melted, label);
        std::vector<char> tracked(ncomp, seeded ? 0 : 1);
        if (seeded) {
            for (std::size_t k = 0; k < grid.size(); ++k) {
                if (seeds[k] && label[k] >= 0) tracked[static_cast<std::size_t>(label[k])] = 1;
            }
        }
        double front = 0.0;
        if (grid.dim() == 1) {
            const double h = grid.spacing(0);
            for (std::size_t k = 0; k < grid.size(); ++k) {
                if (label[k] < 0 || !tracked[static_cast<std::size_t>(label[k])]) continue;
                if (k + 1 < grid.size() && melted[k + 1]) continue;
                // Right end of a tracked component: interpolate to the threshold crossing.
                double pos = grid.coord(k, 0);
                if (k + 1 < grid.size()) {
                    pos += h * (yn[k] - tol) / (yn[k] - yn[k + 1]);
                } else if (grid.bc() == BoundaryKind::Dirichlet) {
                    pos += h * (yn[k] - tol) / yn[k];
                }
                front = std::max(front, pos);
            }
        } else {
            double area = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                if (label[k] >= 0 && tracked[static_cast<std::size_t>(label[k])]) area += grid.weight(k);
            }
            front = std::sqrt(area / std::numbers::pi);
        }
        fb.front.push_back(front);
        fb.melted_measure.push_back(measure);
        fb.components.push_back(ncomp);
        fb.melted.push_back(std::move(melted));
    }
    return fb;
}

StefanSolution solve_stefan_svi(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const StefanData& sd,
                                const SolveConfig& cfg, const BrownianPathSet& paths, double tol_fb) {
    if (grid.bc() != BoundaryKind::Dirichlet) throw ConfigError("solve_stefan_svi requires a Dirichlet grid");
    cfg.validate();
    if (paths.time_grid().steps() != tg.steps()) throw SizeMismatch("paths sampled on a different time grid");
    const double tol = tol_fb > 0.0 ? tol_fb : 10.0 * cfg.eps;
    const double dt = tg.dt();
    const std::size_t nn = grid.size();
    const Field f0 = build_svi_source(sd, grid);
    const ForcingSpec no_forcing;
    const ReactionSpec no_reaction;

    StefanSolution out;
    PathSolution& sol = out.sol;
    sol.tg = tg;
    sol.eps = cfg.eps;
    sol.delta = path_sup(paths);

    auto coefficients = [&](std::size_t n) {
        StepCoefficients c = assemble_coefficients(grid, cs, no_reaction, no_forcing, paths, n, cfg.mu_cap);
        // In the melting formulation the transformed equation carries f0 itself.
        c.source = f0;
        return c;
    };
    auto push = [&](double t, const Field& y, const Field& mu) {
        Field eta(nn), X(nn), eta_x(nn);
        for (std::size_t k = 0; k < nn; ++k) {
            const double e = std::exp(mu[k]);
            eta[k] = beta_eps(y[k], cfg.eps);
            X[k] = e * y[k];
            eta_x[k] = e * eta[k];
        }
        for (Trajectory* tr : {&sol.y, &sol.eta, &sol.X, &sol.eta_X, &sol.mu}) tr->times.push_back(t);
        sol.y.slices.push_back(y);
        sol.eta.slices.push_back(std::move(eta));
        sol.X.slices.push_back(std::move(X));
        sol.eta_X.slices.push_back(std::move(eta_x));
        sol.mu.slices.push_back(mu);
    };

    StepCoefficients coeffs = coefficients(0);
    Field y = grid.zeros();
    double wall = 0.0;
    push(0.0, y, coeffs.mu);
    out.theta.times.push_back(0.0);
    out.theta.slices.push_back(sd.theta0);
    for (std::size_t n = 0; n < tg.steps(); ++n) {
        DirichletLift lift;
        if (sd.wall_temperature > 0.0) {
            lift.left_old = wall;
            wall += dt * std::exp(-mu_at(cs, paths, n + 1, grid, {0.0, 0.0})) * sd.wall_temperature;
            lift.left_new = wall;
        }
        StepResult step = step_interior(grid, y, coeffs, dt, cfg, lift);
        sol.diagnostics.push_back({step.newton_iterations, step.residual, step.stability_margin});
        coeffs = coefficients(n + 1);
        Field theta(nn);
        for (std::size_t k = 0; k < nn; ++k) theta[k] = std::exp(coeffs.mu[k]) * (step.y[k] - y[k]) / dt;
        for (std::size_t k = 0; k < nn; ++k) {
            bool solid = y[k] <= 0.0 && step.y[k] <= 0.0;
            for (int a = 0; a < grid.dim() && solid; ++a) {
                const std::size_t i = grid.axis_index(k, a);
                const std::size_t s = grid.stride(a);
                if (i > 0) solid = solid && step.y[k - s] <= 0.0;
                if (i + 1 < grid.count(a)) solid = solid && step.y[k + s] <= 0.0;
            }
            if (solid) {
                out.source_residual = std::max(out.source_residual, std::abs(beta_eps(step.y[k], cfg.eps) - f0[k]));
            }
        }
        y = std::move(step.y);
        push(tg.time(n + 1), y, coeffs.mu);
        out.theta.times.push_back(tg.time(n + 1));
        out.theta.slices.push_back(std::move(theta));
    }
    out.fb = extract_free_boundary(grid, sol.y, tol, sd.o0_mask);
    return out;
}

SimilaritySolution similarity_oracle(double stefan_number, double t) {
    if (!(stefan_number > 0.0)) throw ConfigError("similarity_oracle: Stefan number must be > 0");
    if (!(t > 0.0)) throw ConfigError("similarity_oracle: time must be > 0");
    const double target = stefan_number / std::sqrt(std::numbers::pi);
    auto f = [&](double l) { return l * std::exp(l * l) * std::erf(l) - target; };
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 16.0) throw ConfigError("similarity_oracle: cannot bracket the root for St = " + std::to_string(stefan_number));
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
    }
    SimilaritySolution s;
    s.lambda = 0.5 * (lo + hi);
    s.residual = std::abs(f(s.lambda));
    s.time = t;
    s.front = 2.0 * s.lambda * std::sqrt(t);
    const double lambda = s.lambda;
    const double front = s.front;
    s.profile = [lambda, front, t](double xi) {
        if (xi >= front) return 0.0;
        return 1.0 - std::erf(xi / (2.0 * std::sqrt(t))) / std::erf(lambda);
    };
    return s;
}

Trajectory baiocchi_forward(const Trajectory& theta, const FreeBoundary& fb, const Grid& grid, const TimeGrid& tg,
                            const std::vector<char>& o0_mask, const Trajectory& mu) {
    if (theta.size() != fb.melted.size()) throw SizeMismatch("baiocchi_forward: theta and free boundary lengths differ");
    if (!mu.slices.empty() && mu.size() != theta.size()) throw SizeMismatch("baiocchi_forward: mu length");
    const std::size_t nn = grid.size();
    const double dt = tg.dt();
    Trajectory y;
    y.times = theta.times;
    Field acc(nn);
    y.slices.push_back(acc);
    for (std::size_t n = 1; n < theta.size(); ++n) {
        for (std::size_t k = 0; k < nn; ++k) {
            const bool liquid0 = !o0_mask.empty() && o0_mask[k];
            const long start = liquid0 ? 1 : fb.first_melted[k];
            if (start < 0 || static_cast<long>(n) < start) continue;
            const double w = mu.slices.empty() ? 1.0 : std::exp(-mu[n][k]);
            acc[k] += dt * w * theta[n][k];
        }
        y.slices.push_back(acc);
    }
    return y;
}

}  // namespace svi
