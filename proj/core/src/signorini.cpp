#include "svi/signorini.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "svi/errors.hpp"
#include "svi/implicit.hpp"
#include "svi/penalty.hpp"
#include "svi/random.hpp"

namespace svi {

namespace {

struct Face {
    int axis;
    double sign;    // outward normal direction along axis
    double weight;  // boundary measure of the face portion owned by the node
};

std::vector<Face> faces_of(const Grid& grid, std::size_t k) {
    std::vector<Face> out;
    for (int a = 0; a < grid.dim(); ++a) {
        const std::size_t i = grid.axis_index(k, a);
        const bool lo = i == 0;
        const bool hi = i + 1 == grid.count(a);
        if (!lo && !hi) continue;
        double w = 1.0;
        if (grid.dim() == 2) {
            const int t = 1 - a;
            const std::size_t it = grid.axis_index(k, t);
            w = (it == 0 || it + 1 == grid.count(t)) ? 0.5 * grid.spacing(t) : grid.spacing(t);
        }
        out.push_back({a, lo ? -1.0 : 1.0, w});
    }
    return out;
}

void require_neumann(const Grid& grid, const char* what) {
    if (grid.bc() != BoundaryKind::Neumann) {
        throw ConfigError(std::string(what) + " requires a Neumann grid (boundary nodes as unknowns)");
    }
}

double form_value(const Grid& grid, const StepCoefficients& c, const BoundaryData& bd, const Field& y,
                  const Field& phi, double eps, bool penalty) {
    require_matches(grid, y, "assemble_form_value");
    require_matches(grid, phi, "assemble_form_value");
    const Field react = effective_reaction(c.reaction, c.mu, c.mu_tilde, c.grad_mu, c.lap_mu, c.t, y);
    const VectorField grad = apply_gradient(grid, y);
    Field interior(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double transport = 0.0;
        for (std::size_t a = 0; a < c.g.dim(); ++a) transport += c.g[a][k] * grad[a][k];
        interior[k] = react[k] + transport;
    }
    double value = dirichlet_form(grid, y, phi) + inner(grid, interior, phi);
    for (std::size_t b = 0; b < bd.nodes.size(); ++b) {
        const std::size_t k = bd.nodes[b];
        const double flux = (penalty ? beta_eps(y[k], eps) : 0.0) + bd.mu_normal[b] * y[k];
        value += bd.weight[b] * flux * phi[k];
    }
    return value;
}

}  // namespace

BoundaryData build_boundary_data(const Grid& grid) {
    require_neumann(grid, "build_boundary_data");
    BoundaryData bd;
    bd.nodes = grid.boundary_nodes();
    for (std::size_t k : bd.nodes) {
        bd.weight.push_back(grid.boundary_weight(k));
        bd.flux_scale.push_back(grid.boundary_weight(k) / grid.weight(k));
    }
    bd.mu_normal.assign(bd.nodes.size(), 0.0);
    return bd;
}

BoundaryData build_boundary_data(const Grid& grid, const CoeffSpec& cs, const BrownianPathSet& paths,
                                 std::size_t n) {
    BoundaryData bd = build_boundary_data(grid);
    if (cs.m() == 0) return bd;
    const MuDerivatives d = eval_mu_derivs(cs, paths, n, grid);
    for (std::size_t b = 0; b < bd.nodes.size(); ++b) {
        double num = 0.0, den = 0.0;
        for (const Face& f : faces_of(grid, bd.nodes[b])) {
            num += f.weight * f.sign * d.grad_mu[static_cast<std::size_t>(f.axis)][bd.nodes[b]];
            den += f.weight;
        }
        bd.mu_normal[b] = num / den;
    }
    return bd;
}

std::vector<double> normal_derivative(const Grid& grid, const BoundaryData& bd, const Field& u) {
    require_matches(grid, u, "normal_derivative");
    std::vector<double> out(bd.nodes.size());
    for (std::size_t b = 0; b < bd.nodes.size(); ++b) {
        const std::size_t k = bd.nodes[b];
        double num = 0.0, den = 0.0;
        for (const Face& f : faces_of(grid, k)) {
            const std::size_t s = grid.stride(f.axis);
            const double h = grid.spacing(f.axis);
            // Inward neighbours along the face normal.
            const std::size_t k1 = f.sign < 0 ? k + s : k - s;
            const std::size_t k2 = f.sign < 0 ? k + 2 * s : k - 2 * s;
            num += f.weight * (3.0 * u[k] - 4.0 * u[k1] + u[k2]) / (2.0 * h);
            den += f.weight;
        }
        out[b] = num / den;
    }
    return out;
}

Field apply_signorini_operator(const Grid& grid, const StepCoefficients& c, const BoundaryData& bd,
                               const Field& y, double eps) {
    require_neumann(grid, "apply_signorini_operator");
    const Field lap = apply_laplacian(grid, y);
    const Field react = effective_reaction(c.reaction, c.mu, c.mu_tilde, c.grad_mu, c.lap_mu, c.t, y);
    const VectorField grad = apply_gradient(grid, y);
    Field out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double transport = 0.0;
        for (std::size_t a = 0; a < c.g.dim(); ++a) transport += c.g[a][k] * grad[a][k];
        out[k] = -lap[k] + react[k] + transport;
    }
    for (std::size_t b = 0; b < bd.nodes.size(); ++b) {
        const std::size_t k = bd.nodes[b];
        out[k] += bd.flux_scale[b] * (beta_eps(y[k], eps) + bd.mu_normal[b] * y[k]);
    }
    return out;
}

double assemble_form_value(const Grid& grid, const StepCoefficients& coeffs, const BoundaryData& bd,
                           const Field& y, const Field& phi, double eps) {
    require_neumann(grid, "assemble_form_value");
    return form_value(grid, coeffs, bd, y, phi, eps, true);
}

StepResult step_signorini(const Grid& grid, const Field& y_n, const StepCoefficients& c, const BoundaryData& bd,
                          double dt, const SolveConfig& cfg) {
    require_neumann(grid, "step_signorini");
    require_matches(grid, y_n, "step_signorini");
    StepResult out;
    out.stability_margin = stability_margin(grid, c.g, dt);
    if (out.stability_margin > 1.0) {
        std::ostringstream msg;
        msg << "stability guard: dt*sup|g|/h = " << out.stability_margin << " > 1 at t = " << c.t;
        throw StabilityViolation(msg.str(), out.stability_margin);
    }
    const Field lap = apply_laplacian(grid, y_n);
    const VectorField grad = apply_gradient(grid, y_n);
    const Field react = effective_reaction(c.reaction, c.mu, c.mu_tilde, c.grad_mu, c.lap_mu, c.t, y_n);
    const std::size_t n = grid.size();
    Field rhs(n);
    for (std::size_t k = 0; k < n; ++k) {
        double transport = 0.0;
        for (std::size_t a = 0; a < c.g.dim(); ++a) transport += c.g[a][k] * grad[a][k];
        rhs[k] = y_n[k] + dt * ((1.0 - cfg.theta) * lap[k] - react[k] - transport + c.source[k]);
    }
    std::vector<double> fixed(n, 0.0), penalty(n, 0.0);
    for (std::size_t b = 0; b < bd.nodes.size(); ++b) {
        fixed[bd.nodes[b]] = dt * bd.flux_scale[b] * bd.mu_normal[b];
        penalty[bd.nodes[b]] = dt * bd.flux_scale[b];
    }
    const ImplicitOperator op(grid, dt * cfg.theta);
    NewtonResult nr = solve_penalized(op, fixed, penalty, cfg.eps, rhs, y_n, cfg.newton_tol, cfg.newton_max);
    out.y = std::move(nr.y);
    out.newton_iterations = nr.iterations;
    out.residual = nr.residual;
    return out;
}

PathSolution solve_signorini(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const ReactionSpec& rs,
                             const ForcingSpec& f, const InitialSpec& x, const SolveConfig& cfg,
                             const BrownianPathSet& paths) {
    require_neumann(grid, "solve_signorini");
    cfg.validate();
    if (paths.time_grid().steps() != tg.steps()) throw SizeMismatch("paths sampled on a different time grid");
    const double dt = tg.dt();
    const std::vector<std::size_t> bnodes = grid.boundary_nodes();

    PathSolution sol;
    sol.tg = tg;
    sol.eps = cfg.eps;
    sol.delta = path_sup(paths);

    auto push = [&](double t, const Field& y, const Field& mu) {
        Field eta(grid.size()), X(grid.size()), eta_x(grid.size());
        for (std::size_t k : bnodes) eta[k] = beta_eps(y[k], cfg.eps);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double e = std::exp(mu[k]);
            X[k] = e * y[k];
            eta_x[k] = e * eta[k];
        }
        sol.y.times.push_back(t);
        sol.eta.times.push_back(t);
        sol.X.times.push_back(t);
        sol.eta_X.times.push_back(t);
        sol.mu.times.push_back(t);
        sol.y.slices.push_back(y);
        sol.eta.slices.push_back(std::move(eta));
        sol.X.slices.push_back(std::move(X));
        sol.eta_X.slices.push_back(std::move(eta_x));
        sol.mu.slices.push_back(mu);
    };

    StepCoefficients coeffs = assemble_coefficients(grid, cs, rs, f, paths, 0, cfg.mu_cap);
    Field y = x.eval(grid);
    push(0.0, y, coeffs.mu);
    for (std::size_t n = 0; n < tg.steps(); ++n) {
        const BoundaryData bd = build_boundary_data(grid, cs, paths, n);
        StepResult step = step_signorini(grid, y, coeffs, bd, dt, cfg);
        sol.diagnostics.push_back({step.newton_iterations, step.residual, step.stability_margin});
        y = std::move(step.y);
        coeffs = assemble_coefficients(grid, cs, rs, f, paths, n + 1, cfg.mu_cap);
        push(tg.time(n + 1), y, coeffs.mu);
    }
    return sol;
}

CoercivityReport coercivity_probe(const Grid& grid, const StepCoefficients& coeffs, const BoundaryData& bd,
                                  double eps, std::size_t n_samples, std::uint64_t seed, bool include_penalty) {
    require_neumann(grid, "coercivity_probe");
    CounterStream rng(stream_key(seed, 0xC0E4C1FEULL));
    const double lmax = std::max(grid.length(0), grid.dim() == 2 ? grid.length(1) : 0.0);
    const double hmin = grid.min_spacing();

    auto dist = [&](std::size_t k) {
        double d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < grid.dim(); ++a) d = std::min({d, grid.coord(k, a), grid.length(a) - grid.coord(k, a)});
        return d;
    };
    auto cosine_mode = [&](int j0, int j1) {
        Field y(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            double v = std::cos(j0 * std::numbers::pi * grid.coord(k, 0) / grid.length(0));
            if (grid.dim() == 2) v *= std::cos(j1 * std::numbers::pi * grid.coord(k, 1) / grid.length(1));
            y[k] = v;
        }
        return y;
    };
    auto layer = [&](double ell, double sign, double offset) {
        Field y(grid.size());
        for (std::size_t k = 0; k < grid.size(); ++k) y[k] = sign * std::exp(-dist(k) / ell) + offset;
        return y;
    };

    std::vector<Field> samples;
    samples.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        switch (i % 3) {
            case 0: {
                Field y(grid.size());
                const int terms = 1 + static_cast<int>(rng.next_u64() % 8);
                for (int t = 0; t < terms; ++t) {
                    const int j0 = static_cast<int>(rng.next_u64() % 9);
                    const int j1 = grid.dim() == 2 ? static_cast<int>(rng.next_u64() % 9) : 0;
                    const double amp = rng.normal() / (1.0 + j0 + j1);
                    const Field mode = cosine_mode(j0, j1);
                    for (std::size_t k = 0; k < y.size(); ++k) y[k] += amp * mode[k];
                }
                samples.push_back(std::move(y));
                break;
            }
            case 1: {
                const double ell = hmin * std::pow(0.5 * lmax / hmin, rng.uniform());
                const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
                samples.push_back(layer(ell, sign, 0.2 * rng.normal()));
                break;
            }
            default: samples.push_back(Field(grid.size(), rng.normal())); break;
        }
    }

    std::vector<Field> probes;
    for (double c : {1.0, -1.0}) probes.push_back(Field(grid.size(), c));
    for (int j = 0; j <= 8; ++j) {
        probes.push_back(cosine_mode(j, grid.dim() == 2 ? j / 2 : 0));
    }
    for (double ell : {hmin, 2.0 * hmin, 4.0 * hmin, 0.05 * lmax, 0.1 * lmax, 0.2 * lmax}) {
        probes.push_back(layer(ell, 1.0, 0.0));
        probes.push_back(layer(ell, -1.0, 0.0));
    }

    struct Quad {
        double form, grad2, l2;
    };
    auto quad = [&](const Field& y) {
        return Quad{form_value(grid, coeffs, bd, y, y, eps, include_penalty), dirichlet_form(grid, y, y),
                    inner(grid, y, y)};
    };
    std::vector<Quad> q;
    for (const Field& y : samples) q.push_back(quad(y));

    CoercivityReport rep;
    rep.samples = samples.size();
    double min_ratio = std::numeric_limits<double>::infinity();
    for (const Quad& s : q) {
        if (s.grad2 > 1e-14 * std::max(1.0, s.l2)) min_ratio = std::min(min_ratio, s.form / s.grad2);
    }
    rep.c2 = std::isfinite(min_ratio) && min_ratio >= 0.5 ? std::min(1.0, min_ratio) : 0.5;
    for (const Quad& s : q) {
        if (s.l2 > 0.0) rep.c3 = std::max(rep.c3, (rep.c2 * s.grad2 - s.form) / s.l2);
    }

    auto violates = [&](const Quad& s) {
        const double bound = rep.c2 * s.grad2 - rep.c3 * s.l2;
        return s.form < bound - 1e-10 * (std::abs(s.form) + rep.c2 * s.grad2 + rep.c3 * s.l2);
    };
    for (const Quad& s : q) rep.violations += violates(s) ? 1 : 0;
    rep.validation_samples = probes.size();
    for (const Field& y : probes) rep.violations += violates(quad(y)) ? 1 : 0;

    double c4_min = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const Field& a = samples[i];
        const Field& b = samples[i + 1];
        const double na = std::sqrt(q[i].grad2 + q[i].l2);
        const double nb = std::sqrt(q[i + 1].grad2 + q[i + 1].l2);
        if (na > 0.0 && nb > 0.0) {
            rep.c1 = std::max(rep.c1, std::abs(form_value(grid, coeffs, bd, a, b, eps, include_penalty)) / (na * nb));
        }
        Field diff(a.size());
        for (std::size_t k = 0; k < a.size(); ++k) diff[k] = a[k] - b[k];
        const double d2 = inner(grid, diff, diff);
        if (d2 > 0.0) {
            const double mono = form_value(grid, coeffs, bd, a, diff, eps, include_penalty) -
                                form_value(grid, coeffs, bd, b, diff, eps, include_penalty);
            c4_min = std::min(c4_min, mono / d2);
        }
    }
    rep.c4 = 0.0 - c4_min;
    return rep;
}

double BoundaryTrajectory::min() const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& row : values) {
        for (double v : row) m = std::min(m, v);
    }
    return std::isfinite(m) ? m : 0.0;
}

double BoundaryTrajectory::squared_integral(const Grid& grid, double dt) const {
    double acc = 0.0;
    for (std::size_t n = 0; n + 1 < values.size(); ++n) {
        for (std::size_t b = 0; b < nodes.size(); ++b) acc += dt * grid.boundary_weight(nodes[b]) * values[n][b] * values[n][b];
    }
    return acc;
}

BoundaryTrajectory recover_boundary_multiplier(const Grid& grid, const PathSolution& sol) {
    BoundaryTrajectory bt;
    bt.nodes = grid.boundary_nodes();
    bt.times = sol.y.times;
    for (const Field& y : sol.y.slices) {
        std::vector<double> row;
        row.reserve(bt.nodes.size());
        for (std::size_t k : bt.nodes) row.push_back(beta_eps(y[k], sol.eps));
        bt.values.push_back(std::move(row));
    }
    return bt;
}

}  // namespace svi
