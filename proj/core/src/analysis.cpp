#include "svi/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include "svi/errors.hpp"
#include "svi/penalty.hpp"

namespace svi {

namespace {

void require_aligned(const Trajectory& a, const Trajectory& b, const char* what) {
    if (a.size() != b.size()) throw SizeMismatch(std::string(what) + ": trajectories have different lengths");
}

Field difference(const Field& a, const Field& b) {
    Field d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = a[k] - b[k];
    return d;
}

double squared(const Grid& grid, const Field& u) { return inner(grid, u, u); }

}  // namespace

ComplementarityReport complementarity_report(const Trajectory& X, const Trajectory& eta, const Grid& grid,
                                             const TimeGrid& tg) {
    require_aligned(X, eta, "complementarity_report");
    ComplementarityReport r;
    const double dt = tg.dt();
    for (std::size_t n = 0; n < X.size(); ++n) {
        require_matches(grid, X[n], "complementarity_report");
        require_matches(grid, eta[n], "complementarity_report");
        double mn = 0.0, mx = 0.0, pair = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            mn = std::min(mn, X[n][k]);
            mx = std::max(mx, eta[n][k]);
            pair += grid.weight(k) * std::abs(X[n][k] * eta[n][k]);
        }
        r.slice_min_X.push_back(mn);
        r.slice_max_eta.push_back(mx);
        r.slice_pairing.push_back(pair);
        if (mn < r.min_X) {
            r.min_X = mn;
            r.worst_level = n;
        }
        r.max_eta = std::max(r.max_eta, mx);
        if (n + 1 < X.size()) r.pairing += dt * pair;
    }
    return r;
}

EnergyReport energy_check(const Grid& grid, const PathSolution& sol, const Field& x, const ForcingSpec& f,
                          double delta, double slack) {
    const double dt = sol.tg.dt();
    const double x2 = squared(grid, x);
    double grad_int = 0.0, f_int = 0.0, mult_int = 0.0;
    EnergyReport r;
    for (std::size_t n = 0; n < sol.y.size(); ++n) {
        const Field& y = sol.y[n];
        const double rhs = x2 + f_int + delta * delta;
        const double lhs = squared(grid, y) + grad_int;
        if (rhs > 0.0) {
            r.ratio = std::max(r.ratio, lhs / rhs);
        } else if (lhs > 0.0) {
            r.ratio = std::numeric_limits<double>::infinity();
        }
        if (n + 1 == sol.y.size()) break;
        grad_int += dt * dirichlet_form(grid, y, y);
        f_int += dt * squared(grid, f.eval(grid, sol.y.times[n]));
        Field beta(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) beta[k] = beta_eps(y[k], sol.eps);
        mult_int += dt * (squared(grid, beta) + squared(grid, apply_laplacian(grid, y)));
    }
    const double mult_rhs = f_int + sol.tg.horizon() * delta * delta;
    if (mult_rhs > 0.0) {
        r.multiplier_ratio = mult_int / mult_rhs;
    } else {
        r.multiplier_ratio = mult_int > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    r.pass = r.ratio <= slack;
    return r;
}

RateFit fit_rate(std::vector<double> params, std::vector<double> errors) {
    if (params.size() != errors.size()) throw SizeMismatch("fit_rate: params and errors differ in length");
    RateFit fit;
    fit.params = std::move(params);
    fit.errors = std::move(errors);
    fit.slope_running.assign(fit.params.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 1; i < fit.params.size(); ++i) {
        if (fit.errors[i] > 0.0 && fit.errors[i - 1] > 0.0) {
            fit.slope_running[i] = std::log(fit.errors[i - 1] / fit.errors[i]) / std::log(fit.params[i - 1] / fit.params[i]);
        }
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < fit.params.size(); ++i) {
        if (fit.errors[i] > 0.0) {
            lx.push_back(std::log(fit.params[i]));
            ly.push_back(std::log(fit.errors[i]));
        }
    }
    if (lx.size() < 2) {
        fit.degenerate = true;
        fit.slope = std::numeric_limits<double>::quiet_NaN();
        fit.intercept = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i] / n;
        my += ly[i] / n;
    }
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double e = ly[i] - (fit.intercept + fit.slope * lx[i]);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    return fit;
}

RateFit cauchy_rate_study(const Problem& problem, const std::vector<double>& eps_list, const BrownianPathSet& paths) {
    if (eps_list.size() < 4) throw ConfigError("penalty.eps needs at least 4 values for a rate study");
    for (double e : eps_list) {
        if (!(e > 0.0)) throw ConfigError("penalty.eps must be > 0");
    }
    const double q = eps_list[1] / eps_list[0];
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        const double qi = eps_list[i] / eps_list[i - 1];
        if (!(qi < 1.0)) throw ConfigError("penalty.eps must be strictly decreasing");
        if (std::abs(qi - q) > 1e-6 * q) throw ConfigError("penalty.eps must be geometrically spaced");
    }
    auto run = [&](double eps) {
        SolveConfig cfg = problem.cfg;
        cfg.eps = eps;
        return solve_path(problem.grid, problem.tg, problem.coeffs, problem.reaction, problem.forcing,
                          problem.initial, cfg, paths);
    };
    const PathSolution ref = run(eps_list.back() / 4.0);
    std::vector<double> errors;
    for (double eps : eps_list) {
        const PathSolution sol = run(eps);
        double e = 0.0;
        for (std::size_t n = 0; n < sol.y.size(); ++n) {
            e = std::max(e, norm_l2(problem.grid, difference(sol.y[n], ref.y[n])));
        }
        errors.push_back(e);
    }
    return fit_rate(eps_list, std::move(errors));
}

RateFit mesh_rate_study(const Problem& problem, const std::vector<std::size_t>& n_list,
                        const BrownianPathSet& paths) {
    if (n_list.size() < 3) throw ConfigError("run.mesh_n needs at least 3 grid sizes");
    for (std::size_t i = 1; i < n_list.size(); ++i) {
        if (n_list[i] != 2 * n_list[i - 1] + 1 || problem.grid.bc() != BoundaryKind::Dirichlet) {
            throw ConfigError("run.mesh_n must be nested Dirichlet sizes n, 2n+1, 4n+3, ...");
        }
    }
    const Grid& g0 = problem.grid;
    std::vector<double> lengths;
    for (int a = 0; a < g0.dim(); ++a) lengths.push_back(g0.length(a));
    std::vector<Field> finals;
    std::vector<Grid> grids;
    for (std::size_t n : n_list) {
        grids.push_back(build_grid(g0.dim(), lengths, n, g0.bc()));
        const PathSolution sol = solve_path(grids.back(), problem.tg, problem.coeffs, problem.reaction,
                                            problem.forcing, problem.initial, problem.cfg, paths);
        finals.push_back(sol.y.back());
    }
    const Grid& fine = grids.back();
    std::vector<double> h, errors;
    for (std::size_t j = 0; j + 1 < grids.size(); ++j) {
        const Grid& g = grids[j];
        const std::size_t factor = (fine.count(0) + 1) / (g.count(0) + 1);
        Field d(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            std::size_t fk = 0;
            for (int a = 0; a < g.dim(); ++a) fk += ((g.axis_index(k, a) + 1) * factor - 1) * fine.stride(a);
            d[k] = finals[j][k] - finals.back()[fk];
        }
        h.push_back(g.min_spacing());
        errors.push_back(norm_l2(g, d));
    }
    return fit_rate(std::move(h), std::move(errors));
}

const std::vector<std::string>& ensemble_functionals() {
    static const std::vector<std::string> names{"sup_y2",    "int_h1",    "int_beta2", "int_lap2",
                                                "int_dydt2", "int_dydt",  "delta2",    "energy_ratio"};
    return names;
}

FunctionalStats summarize(std::string name, const std::vector<double>& values) {
    FunctionalStats s;
    s.name = std::move(name);
    const double n = static_cast<double>(values.size());
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= n;
    if (values.size() > 1) {
        for (double v : values) s.variance += (v - s.mean) * (v - s.mean);
        s.variance /= n - 1.0;
    }
    s.ci_half_width = 1.96 * std::sqrt(s.variance / n);
    return s;
}

bool EnsembleStats::failed() const {
    const std::size_t total = n_paths + n_failures;
    return total == 0 || 10 * n_failures > total;
}

const FunctionalStats& EnsembleStats::get(const std::string& name) const {
    for (const FunctionalStats& f : functionals) {
        if (f.name == name) return f;
    }
    throw ConfigError("unknown functional '" + name + "'");
}

std::vector<double> EnsembleStats::column(const std::string& name) const {
    std::size_t j = functionals.size();
    for (std::size_t i = 0; i < functionals.size(); ++i) {
        if (functionals[i].name == name) j = i;
    }
    if (j == functionals.size()) throw ConfigError("unknown functional '" + name + "'");
    std::vector<double> col;
    for (const auto& row : per_path) col.push_back(row[j]);
    return col;
}

namespace {

std::vector<double> path_functionals(const Grid& grid, const PathSolution& sol, const Field& x,
                                     const ForcingSpec& f, double slack) {
    const double dt = sol.tg.dt();
    double sup_y2 = 0.0, h1 = 0.0, beta2 = 0.0, lap2 = 0.0, dydt2 = 0.0, dydt = 0.0;
    for (std::size_t n = 0; n < sol.y.size(); ++n) {
        const Field& y = sol.y[n];
        sup_y2 = std::max(sup_y2, squared(grid, y));
        if (n + 1 == sol.y.size()) break;
        h1 += dt * (squared(grid, y) + dirichlet_form(grid, y, y));
        Field beta(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) beta[k] = beta_eps(y[k], sol.eps);
        beta2 += dt * squared(grid, beta);
        lap2 += dt * squared(grid, apply_laplacian(grid, y));
        Field rate = difference(sol.y[n + 1], y);
        for (double& v : rate) v /= dt;
        const double r2 = squared(grid, rate);
        dydt2 += dt * r2;
        dydt += dt * std::sqrt(r2);
    }
    const EnergyReport e = energy_check(grid, sol, x, f, sol.delta, slack);
    return {sup_y2, h1, beta2, lap2, dydt2, dydt, sol.delta * sol.delta, e.ratio};
}

template <class Task>
void run_pool(std::size_t n_tasks, unsigned workers, Task task) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, n_tasks))));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i = next++; i < n_tasks; i = next++) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace

EnsembleStats ensemble_run(const Problem& problem, std::size_t n_paths, std::uint64_t base_seed, double slack,
                           unsigned workers) {
    if (n_paths < 2) throw ConfigError("run.n_paths must be >= 2");
    const Field x = problem.initial.eval(problem.grid);
    struct Slot {
        std::optional<std::vector<double>> values;
        std::string failure;
    };
    std::vector<Slot> slots(n_paths);
    run_pool(n_paths, workers, [&](std::size_t i) {
        try {
            const PathSolution sol = problem.solve(problem.paths(base_seed, i));
            slots[i].values = path_functionals(problem.grid, sol, x, problem.forcing, slack);
        } catch (const NumericalFailure& e) {
            slots[i].failure = e.what();
        }
    });

    EnsembleStats st;
    for (std::size_t i = 0; i < n_paths; ++i) {
        if (slots[i].values) {
            st.per_path.push_back(std::move(*slots[i].values));
            st.path_ids.push_back(i);
        } else {
            st.failure_messages.push_back("path " + std::to_string(i) + ": " + slots[i].failure);
        }
    }
    st.n_paths = st.per_path.size();
    st.n_failures = n_paths - st.n_paths;

    const double dt = problem.tg.dt();
    double data = squared(problem.grid, x);
    for (std::size_t n = 0; n < problem.tg.steps(); ++n) {
        data += dt * squared(problem.grid, problem.forcing.eval(problem.grid, problem.tg.time(n)));
    }
    const auto& names = ensemble_functionals();
    for (std::size_t j = 0; j < names.size(); ++j) {
        std::vector<double> col;
        for (const auto& row : st.per_path) col.push_back(row[j]);
        FunctionalStats fs = summarize(names[j], col);
        fs.empirical_c = data > 0.0 ? fs.mean / data : std::numeric_limits<double>::infinity();
        st.functionals.push_back(std::move(fs));
    }
    return st;
}

EnsembleStats noise_statistics(const TimeGrid& tg, std::size_t m, std::size_t n_paths, std::uint64_t seed) {
    if (m == 0) throw ConfigError("noise.m must be >= 1 for noise statistics");
    if (n_paths < 2) throw ConfigError("run.n_paths must be >= 2");
    EnsembleStats st;
    std::vector<std::string> names;
    for (std::size_t k = 0; k < m; ++k) names.push_back("beta" + std::to_string(k + 1) + "_T2");
    names.push_back("delta2");
    for (std::size_t i = 0; i < n_paths; ++i) {
        const BrownianPathSet p = sample_paths(tg, m, seed, i);
        std::vector<double> row;
        for (std::size_t k = 0; k < m; ++k) {
            const double b = p.value(k, tg.steps());
            row.push_back(b * b);
        }
        const double d = path_sup(p);
        row.push_back(d * d);
        st.per_path.push_back(std::move(row));
        st.path_ids.push_back(i);
    }
    st.n_paths = n_paths;
    for (std::size_t j = 0; j < names.size(); ++j) {
        std::vector<double> col;
        for (const auto& row : st.per_path) col.push_back(row[j]);
        FunctionalStats fs = summarize(names[j], col);
        fs.empirical_c = std::numeric_limits<double>::quiet_NaN();
        st.functionals.push_back(std::move(fs));
    }
    return st;
}

}  // namespace svi
