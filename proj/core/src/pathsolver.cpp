#include "svi/pathsolver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "svi/errors.hpp"
#include "svi/implicit.hpp"
#include "svi/penalty.hpp"

namespace svi {

void SolveConfig::validate() const {
    if (!(theta >= 0.5 && theta <= 1.0)) throw ConfigError("time.theta must lie in [0.5, 1]");
    if (!(eps > 0.0)) throw ConfigError("penalty.eps must be > 0");
    if (!(newton_tol > 0.0)) throw ConfigError("run.newton_tol must be > 0");
    if (newton_max < 1) throw ConfigError("run.newton_max must be >= 1");
    if (!(mu_cap > 0.0)) throw ConfigError("run.mu_cap must be > 0");
    if (max_halvings < 0) throw ConfigError("run.max_halvings must be >= 0");
}

StepCoefficients StepCoefficients::deterministic(const Grid& grid, Field source, ReactionSpec reaction, double t) {
    StepCoefficients c;
    c.t = t;
    c.mu = grid.zeros();
    c.mu_tilde = grid.zeros();
    c.grad_mu.components.assign(static_cast<std::size_t>(grid.dim()), grid.zeros());
    c.lap_mu = grid.zeros();
    c.g = c.grad_mu;
    c.source = std::move(source);
    c.reaction = reaction;
    return c;
}

double stability_margin(const Grid& grid, const VectorField& g, double dt) {
    double m = 0.0;
    for (int a = 0; a < static_cast<int>(g.dim()); ++a) {
        m = std::max(m, dt * norm_max(g[static_cast<std::size_t>(a)]) / grid.spacing(a));
    }
    return m;
}

namespace {

StepResult step_with(const ImplicitOperator& op, const Field& y_n, const StepCoefficients& c, double dt,
                     const SolveConfig& cfg, const DirichletLift& lift) {
    const Grid& grid = op.grid();
    StepResult out;
    out.stability_margin = stability_margin(grid, c.g, dt);
    if (out.stability_margin > 1.0) {
        std::ostringstream msg;
        msg << "stability guard: dt*sup|g|/h = " << out.stability_margin << " > 1 at t = " << c.t;
        throw StabilityViolation(msg.str(), out.stability_margin);
    }
    require_matches(grid, y_n, "step_interior");
    require_matches(grid, c.source, "step_interior source");

    Field lap = apply_laplacian(grid, y_n);
    VectorField grad = apply_gradient(grid, y_n);
    const Field react = effective_reaction(c.reaction, c.mu, c.mu_tilde, c.grad_mu, c.lap_mu, c.t, y_n);
    const std::size_t n = grid.size();
    const double theta = cfg.theta;

    Field rhs(n);
    if (lift.active()) {
        if (grid.dim() != 1) throw ConfigError("Dirichlet lift is only supported in 1D");
        const double h = grid.spacing(0);
        lap[0] += lift.left_old / (h * h);
        lap[n - 1] += lift.right_old / (h * h);
        grad[0][0] -= lift.left_old / (2.0 * h);
        grad[0][n - 1] += lift.right_old / (2.0 * h);
    }
    for (std::size_t k = 0; k < n; ++k) {
        double transport = 0.0;
        for (std::size_t a = 0; a < c.g.dim(); ++a) transport += c.g[a][k] * grad[a][k];
        rhs[k] = y_n[k] + dt * ((1.0 - theta) * lap[k] - react[k] - transport + c.source[k]);
    }
    if (lift.active()) {
        const double h = grid.spacing(0);
        rhs[0] += dt * theta * lift.left_new / (h * h);
        rhs[n - 1] += dt * theta * lift.right_new / (h * h);
    }

    const std::vector<double> penalty(n, dt);
    NewtonResult nr = solve_penalized(op, {}, penalty, cfg.eps, rhs, y_n, cfg.newton_tol, cfg.newton_max);
    out.y = std::move(nr.y);
    out.newton_iterations = nr.iterations;
    out.residual = nr.residual;
    return out;
}

Field map_eps(const Field& y, double eps) {
    Field out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) out[k] = beta_eps(y[k], eps);
    return out;
}

Field scale_exp(const Field& mu, const Field& v) {
    Field out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = std::exp(mu[k]) * v[k];
    return out;
}

void require_path_grid(const TimeGrid& tg, const BrownianPathSet& paths) {
    if (paths.time_grid().steps() != tg.steps() || paths.time_grid().horizon() != tg.horizon()) {
        throw SizeMismatch("Brownian paths were sampled on a different time grid");
    }
}

void push_slice(PathSolution& sol, double t, Field y, Field eta, Field mu) {
    Field X = scale_exp(mu, y);
    Field eta_x = scale_exp(mu, eta);
    sol.y.times.push_back(t);
    sol.eta.times.push_back(t);
    sol.X.times.push_back(t);
    sol.eta_X.times.push_back(t);
    sol.mu.times.push_back(t);
    sol.y.slices.push_back(std::move(y));
    sol.eta.slices.push_back(std::move(eta));
    sol.X.slices.push_back(std::move(X));
    sol.eta_X.slices.push_back(std::move(eta_x));
    sol.mu.slices.push_back(std::move(mu));
}

}  // namespace

StepResult step_interior(const Grid& grid, const Field& y_n, const StepCoefficients& coeffs, double dt,
                         const SolveConfig& cfg, const DirichletLift& lift) {
    if (grid.bc() != BoundaryKind::Dirichlet) throw ConfigError("step_interior requires a Dirichlet grid");
    cfg.validate();
    const ImplicitOperator op(grid, dt * cfg.theta);
    return step_with(op, y_n, coeffs, dt, cfg, lift);
}

StepCoefficients assemble_coefficients(const Grid& grid, const CoeffSpec& cs, const ReactionSpec& rs,
                                       const ForcingSpec& f, const BrownianPathSet& paths, std::size_t n,
                                       double mu_cap) {
    StepCoefficients c;
    c.t = paths.time_grid().time(n);
    c.mu = eval_mu(cs, paths, n, grid);
    check_mu_cap(c.mu, mu_cap);
    c.mu_tilde = eval_mu_tilde(cs, paths, n, grid);
    MuDerivatives d = eval_mu_derivs(cs, paths, n, grid);
    c.grad_mu = std::move(d.grad_mu);
    c.lap_mu = std::move(d.lap_mu);
    c.g = std::move(d.g);
    c.source = effective_source(c.mu, f.eval(grid, c.t));
    c.reaction = rs;
    return c;
}

PathSolution solve_path(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const ReactionSpec& rs,
                        const ForcingSpec& f, const InitialSpec& x, const SolveConfig& cfg,
                        const BrownianPathSet& paths) {
    if (grid.bc() != BoundaryKind::Dirichlet) throw ConfigError("solve_path requires a Dirichlet grid");
    cfg.validate();
    require_path_grid(tg, paths);
    const double dt = tg.dt();
    const ImplicitOperator op(grid, dt * cfg.theta);

    PathSolution sol;
    sol.tg = tg;
    sol.eps = cfg.eps;
    sol.delta = path_sup(paths);
    sol.diagnostics.reserve(tg.steps());

    StepCoefficients coeffs = assemble_coefficients(grid, cs, rs, f, paths, 0, cfg.mu_cap);
    Field y = x.eval(grid);
    push_slice(sol, 0.0, y, map_eps(y, cfg.eps), coeffs.mu);
    for (std::size_t n = 0; n < tg.steps(); ++n) {
        StepResult step = step_with(op, y, coeffs, dt, cfg, {});
        sol.diagnostics.push_back({step.newton_iterations, step.residual, step.stability_margin});
        y = std::move(step.y);
        coeffs = assemble_coefficients(grid, cs, rs, f, paths, n + 1, cfg.mu_cap);
        push_slice(sol, tg.time(n + 1), y, map_eps(y, cfg.eps), coeffs.mu);
    }
    return sol;
}

PathSolution solve_path_adaptive(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs,
                                 const ReactionSpec& rs, const ForcingSpec& f, const InitialSpec& x,
                                 const SolveConfig& cfg, const BrownianPathSet& paths) {
    BrownianPathSet p = paths;
    TimeGrid t = tg;
    for (int halvings = 0;; ++halvings) {
        try {
            PathSolution sol = solve_path(grid, t, cs, rs, f, x, cfg, p);
            sol.halvings = halvings;
            return sol;
        } catch (const StabilityViolation&) {
            if (halvings >= cfg.max_halvings) throw;
            p = refine_paths(p);
            t = t.halved();
        }
    }
}

Trajectory recover_multiplier(const PathSolution& sol) {
    Trajectory eta;
    eta.times = sol.y.times;
    eta.slices.reserve(sol.y.size());
    for (const Field& y : sol.y.slices) eta.slices.push_back(map_eps(y, sol.eps));
    return eta;
}

PathSolution direct_em_solve(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const ReactionSpec& rs,
                             const ForcingSpec& f, const InitialSpec& x, const SolveConfig& cfg,
                             const BrownianPathSet& paths) {
    if (grid.bc() != BoundaryKind::Dirichlet) throw ConfigError("direct_em_solve requires a Dirichlet grid");
    cfg.validate();
    require_path_grid(tg, paths);
    const double dt = tg.dt();
    const double theta = cfg.theta;
    const ImplicitOperator op(grid, dt * theta);
    const std::size_t n_nodes = grid.size();

    // Spatial profiles amplitude * b_k, fixed in time.
    std::vector<Field> profile;
    for (std::size_t k = 0; k < cs.m(); ++k) {
        Field b(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) b[i] = cs.terms[k].amplitude * cs.terms[k].space.eval(grid, i).value;
        profile.push_back(std::move(b));
    }

    PathSolution sol;
    sol.tg = tg;
    sol.eps = cfg.eps;
    sol.delta = path_sup(paths);
    sol.diagnostics.reserve(tg.steps());

    auto record = [&](double t, std::size_t n, const Field& X) {
        Field mu = eval_mu(cs, paths, n, grid);
        check_mu_cap(mu, cfg.mu_cap);
        Field eta_x = map_eps(X, cfg.eps);
        Field y(n_nodes), eta(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            const double e = std::exp(-mu[i]);
            y[i] = e * X[i];
            eta[i] = e * eta_x[i];
        }
        sol.X.times.push_back(t);
        sol.eta_X.times.push_back(t);
        sol.y.times.push_back(t);
        sol.eta.times.push_back(t);
        sol.mu.times.push_back(t);
        sol.X.slices.push_back(X);
        sol.eta_X.slices.push_back(std::move(eta_x));
        sol.y.slices.push_back(std::move(y));
        sol.eta.slices.push_back(std::move(eta));
        sol.mu.slices.push_back(std::move(mu));
    };

    Field X = x.eval(grid);
    record(0.0, 0, X);
    const std::vector<double> penalty(n_nodes, dt);
    for (std::size_t n = 0; n < tg.steps(); ++n) {
        const double t = tg.time(n);
        const Field lap = apply_laplacian(grid, X);
        const Field src = f.eval(grid, t);
        Field rhs(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            double noise = 0.0;
            for (std::size_t k = 0; k < cs.m(); ++k) {
                noise += cs.terms[k].time.value(t) * profile[k][i] * paths.increment(k, n);
            }
            rhs[i] = X[i] + dt * ((1.0 - theta) * lap[i] - rs(X[i]) + src[i]) + X[i] * noise;
        }
        NewtonResult nr = solve_penalized(op, {}, penalty, cfg.eps, rhs, X, cfg.newton_tol, cfg.newton_max);
        sol.diagnostics.push_back({nr.iterations, nr.residual, 0.0});
        X = std::move(nr.y);
        record(tg.time(n + 1), n + 1, X);
    }
    return sol;
}

}  // namespace svi
