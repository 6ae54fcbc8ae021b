#include "svi_cli/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "svi/analysis.hpp"
#include "svi/penalty.hpp"
#include "svi/signorini.hpp"
#include "svi/stefan.hpp"
#include "svi_cli/acceptance.hpp"
#include "svi_cli/csv.hpp"

namespace svi::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct SummaryRow {
    std::string name;
    double value;
    double threshold;
    std::string status;
};

class Summary {
public:
    void info(std::string name, double value) { rows_.push_back({std::move(name), value, kNaN, "info"}); }
    void check(std::string name, double value, double threshold, bool pass) {
        rows_.push_back({std::move(name), value, threshold, pass ? "pass" : "fail"});
        all_pass_ = all_pass_ && pass;
    }
    bool all_pass() const { return all_pass_; }

    void write(const RunConfig& cfg) const {
        CsvWriter w(cfg.out_dir / "summary.csv", cfg.hash, {"check_name", "value", "threshold", "status"});
        for (const auto& r : rows_) w.row({r.name, r.value, r.threshold, r.status});
        w.close();
    }

private:
    std::vector<SummaryRow> rows_;
    bool all_pass_ = true;
};

void write_trajectory(const RunConfig& cfg, const Grid& grid, const PathSolution& sol) {
    CsvWriter w(cfg.out_dir / "trajectory.csv", cfg.hash, {"t", "node_index", "xi_0", "xi_1", "y", "X", "eta"});
    for (std::size_t n = 0; n < sol.y.size(); ++n) {
        if (n % cfg.trajectory_stride != 0 && n + 1 != sol.y.size()) continue;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            w.row({sol.y.times[n], k, grid.coord(k, 0), grid.dim() == 2 ? grid.coord(k, 1) : 0.0, sol.y[n][k],
                   sol.X[n][k], sol.eta_X[n][k]});
        }
    }
    w.close();
}

void write_rates(const RunConfig& cfg, const RateFit& fit) {
    CsvWriter w(cfg.out_dir / "rates.csv", cfg.hash, {"eps", "error_l2", "slope_running"});
    for (std::size_t i = 0; i < fit.params.size(); ++i) w.row({fit.params[i], fit.errors[i], fit.slope_running[i]});
    w.close();
}

void rate_summary(Summary& s, const RateFit& fit, bool check_slope) {
    s.info("fit_residual", fit.residual);
    s.info("intercept", fit.intercept);
    if (fit.degenerate) {
        s.info("degenerate", 1.0);
        s.info("slope", kNaN);
    } else if (check_slope) {
        s.check("slope", fit.slope, 0.45, fit.slope >= 0.45);
    } else {
        s.info("slope", fit.slope);
    }
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return kNaN;
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const auto i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    return i + 1 < v.size() ? v[i] * (1.0 - frac) + v[i + 1] * frac : v[i];
}

int run_single(const RunConfig& cfg, Summary& s, std::ostream& log) {
    const Problem p = cfg.problem();
    const PathSolution sol = p.solve(p.paths(cfg.seed, cfg.path_id));
    write_trajectory(cfg, p.grid, sol);
    const ComplementarityReport cr = complementarity_report(sol.X, sol.eta_X, p.grid, sol.tg);
    s.info("min_X", cr.min_X);
    s.check("max_eta", cr.max_eta, 1e-12, cr.max_eta <= 1e-12);
    s.info("pairing", cr.pairing);
    const EnergyReport er = energy_check(p.grid, sol, p.initial.eval(p.grid), p.forcing, sol.delta, cfg.slack);
    s.check("energy_ratio", er.ratio, cfg.slack, er.pass);
    s.info("multiplier_ratio", er.multiplier_ratio);
    s.info("delta", sol.delta);
    s.info("dt_halvings", sol.halvings);
    if (!cfg.quiet) log << "run: " << sol.tg.steps() << " steps, energy ratio " << er.ratio << '\n';
    return kExitOk;
}

int run_ensemble(const RunConfig& cfg, Summary& s, std::ostream& log) {
    const Problem p = cfg.problem();
    const EnsembleStats st = ensemble_run(p, cfg.n_paths, cfg.seed, cfg.slack, cfg.workers);
    CsvWriter w(cfg.out_dir / "stats.csv", cfg.hash,
                {"functional", "mean", "variance", "ci_half_width", "n_paths", "n_failures"});
    for (const FunctionalStats& f : st.functionals) {
        w.row({f.name, f.mean, f.variance, f.ci_half_width, st.n_paths, st.n_failures});
    }
    w.close();
    for (const FunctionalStats& f : st.functionals) s.info("empirical_c_" + f.name, f.empirical_c);
    const auto ratios = st.column("energy_ratio");
    const double worst = ratios.empty() ? kNaN : *std::max_element(ratios.begin(), ratios.end());
    s.check("max_energy_ratio", worst, cfg.slack, worst <= cfg.slack);
    const double fail_frac = static_cast<double>(st.n_failures) / static_cast<double>(cfg.n_paths);
    s.check("failure_fraction", fail_frac, 0.1, !st.failed());
    for (const auto& m : st.failure_messages) log << m << '\n';
    if (!cfg.quiet) log << "ensemble: " << st.n_paths << " paths, " << st.n_failures << " failures\n";
    return st.failed() ? kExitNumerical : kExitOk;
}

int run_rate_eps(const RunConfig& cfg, Summary& s, std::ostream& log) {
    const Problem p = cfg.problem();
    const RateFit fit = cauchy_rate_study(p, cfg.eps, p.paths(cfg.seed, cfg.path_id));
    write_rates(cfg, fit);
    rate_summary(s, fit, true);
    if (!cfg.quiet) log << "rate-eps: slope " << fit.slope << '\n';
    return kExitOk;
}

int run_rate_mesh(const RunConfig& cfg, Summary& s, std::ostream& log) {
    RunConfig base = cfg;
    base.n = cfg.mesh_n.front();
    const Problem p = base.problem();
    const RateFit fit = mesh_rate_study(p, cfg.mesh_n, p.paths(cfg.seed, cfg.path_id));
    write_rates(cfg, fit);
    rate_summary(s, fit, false);
    if (!cfg.quiet) log << "rate-mesh: slope " << fit.slope << '\n';
    return kExitOk;
}

int run_stefan(const RunConfig& cfg, Summary& s, std::ostream& log) {
    const Grid grid = cfg.grid();
    const TimeGrid tg = cfg.time_grid();
    const StefanData sd = make_stefan_data(grid, cfg.theta0.eval(grid), cfg.rho, cfg.wall_temperature);
    const SolveConfig sc = cfg.solve_config();
    std::vector<double> mean_front(tg.steps() + 1), mean_measure(tg.steps() + 1), finals;
    bool monotone = true;
    double source_residual = 0.0, round_trip = 0.0, round_trip_tol = 0.0;
    for (std::size_t i = 0; i < cfg.n_paths; ++i) {
        const BrownianPathSet paths = sample_paths(tg, cfg.coeffs.m(), cfg.seed, cfg.path_id + i);
        const StefanSolution st = solve_stefan_svi(grid, tg, cfg.coeffs, sd, sc, paths, cfg.tol_fb);
        for (std::size_t n = 0; n < st.fb.front.size(); ++n) {
            mean_front[n] += st.fb.front[n] / static_cast<double>(cfg.n_paths);
            mean_measure[n] += st.fb.melted_measure[n] / static_cast<double>(cfg.n_paths);
        }
        finals.push_back(st.fb.front.back());
        monotone = monotone && st.fb.monotone();
        source_residual = std::max(source_residual, st.source_residual);
        const Trajectory back = baiocchi_forward(st.theta, st.fb, grid, tg, sd.o0_mask, st.sol.mu);
        double theta_max = 0.0;
        for (std::size_t n = 0; n < back.size(); ++n) {
            theta_max = std::max(theta_max, norm_max(st.theta[n]));
            for (std::size_t k = 0; k < grid.size(); ++k) {
                round_trip = std::max(round_trip, std::abs(back[n][k] - st.sol.y[n][k]));
            }
        }
        round_trip_tol = std::max(round_trip_tol, tg.dt() * std::max(1.0, theta_max));
    }
    CsvWriter w(cfg.out_dir / "front.csv", cfg.hash, {"t", "front_position", "melted_measure"});
    for (std::size_t n = 0; n <= tg.steps(); ++n) w.row({tg.time(n), mean_front[n], mean_measure[n]});
    w.close();

    s.check("front_monotone", monotone ? 1.0 : 0.0, 1.0, monotone);
    s.check("baiocchi_round_trip", round_trip, round_trip_tol, round_trip <= round_trip_tol);
    s.info("source_residual", source_residual);
    const bool similarity = cfg.coeffs.m() == 0 && cfg.wall_temperature > 0.0 &&
                            std::none_of(sd.o0_mask.begin(), sd.o0_mask.end(), [](char c) { return c != 0; });
    if (similarity) {
        const SimilaritySolution o = similarity_oracle(cfg.wall_temperature / cfg.rho, tg.horizon());
        const double rel = std::abs(finals.front() - o.front) / o.front;
        s.info("similarity_front", o.front);
        s.check("similarity_residual", o.residual, 1e-10, o.residual < 1e-10);
        s.check("similarity_rel_error", rel, 0.02, rel <= 0.02);
    }
    if (cfg.n_paths > 1) {
        s.info("final_front_q05", quantile(finals, 0.05));
        s.info("final_front_q50", quantile(finals, 0.5));
        s.info("final_front_q95", quantile(finals, 0.95));
    }
    s.info("final_front_mean", mean_front.back());
    if (!cfg.quiet) log << "stefan: final front " << mean_front.back() << '\n';
    return kExitOk;
}

int run_signorini(const RunConfig& cfg, Summary& s, std::ostream& log) {
    const Problem p = cfg.problem();
    const BrownianPathSet paths = p.paths(cfg.seed, cfg.path_id);
    const PathSolution sol =
        solve_signorini(p.grid, p.tg, p.coeffs, p.reaction, p.forcing, p.initial, p.cfg, paths);
    write_trajectory(cfg, p.grid, sol);
    double trace_min = 0.0;
    for (const Field& X : sol.X.slices) {
        for (std::size_t k : p.grid.boundary_nodes()) trace_min = std::min(trace_min, X[k]);
    }
    const BoundaryTrajectory bt = recover_boundary_multiplier(p.grid, sol);
    double eta_max = 0.0;
    for (const auto& row : bt.values) {
        for (double v : row) eta_max = std::max(eta_max, v);
    }
    const Field ones(p.grid.size(), 1.0);
    const double drift = std::abs(inner(p.grid, sol.y.back(), ones) - inner(p.grid, sol.y[0], ones)) / p.tg.horizon();
    const std::size_t n_mid = p.tg.steps() / 2;
    const StepCoefficients c = assemble_coefficients(p.grid, p.coeffs, p.reaction, p.forcing, paths, n_mid, p.cfg.mu_cap);
    const CoercivityReport rep =
        coercivity_probe(p.grid, c, build_boundary_data(p.grid, p.coeffs, paths, n_mid), p.cfg.eps, 120, cfg.seed);
    s.info("boundary_min_X", trace_min);
    s.check("boundary_max_eta", eta_max, 1e-12, eta_max <= 1e-12);
    s.info("boundary_multiplier_l2sq", bt.squared_integral(p.grid, p.tg.dt()));
    s.info("mass_drift_per_time", drift);
    s.info("coercivity_c1", rep.c1);
    s.info("coercivity_c2", rep.c2);
    s.info("coercivity_c3", rep.c3);
    s.info("coercivity_c4", rep.c4);
    s.check("coercivity_violations", static_cast<double>(rep.violations), 0.0, rep.violations == 0);
    s.info("delta", sol.delta);
    if (!cfg.quiet) log << "signorini: boundary min X " << trace_min << '\n';
    return kExitOk;
}

int run_verify(const RunConfig& cfg, Summary& s, std::ostream& log) {
    AcceptanceOptions opts;
    opts.workers = cfg.workers;
    opts.scratch = cfg.out_dir / "verify_scratch";
    const auto results = run_acceptance(opts);
    std::filesystem::remove_all(opts.scratch);
    bool all = true;
    for (const CriterionResult& r : results) {
        for (const CheckRow& c : r.checks) s.check("c" + std::to_string(r.id) + "_" + c.name, c.value, c.threshold, c.pass);
        s.check("criterion_" + std::to_string(r.id), r.pass() ? 1.0 : 0.0, 1.0, r.pass());
        all = all && r.pass();
        if (!cfg.quiet) {
            log << "criterion " << r.id << " " << r.title << ": " << (r.pass() ? "pass" : "FAIL") << '\n';
            if (!r.error.empty()) log << "  error: " << r.error << '\n';
        }
    }
    return all ? kExitOk : kExitVerify;
}

}  // namespace

int dispatch(const RunConfig& cfg, std::ostream& log) {
    Summary s;
    int code = kExitOk;
    try {
        validate(cfg);
        std::filesystem::create_directories(cfg.out_dir);
        switch (cfg.mode) {
            case Mode::Run: code = run_single(cfg, s, log); break;
            case Mode::Ensemble: code = run_ensemble(cfg, s, log); break;
            case Mode::RateEps: code = run_rate_eps(cfg, s, log); break;
            case Mode::RateMesh: code = run_rate_mesh(cfg, s, log); break;
            case Mode::Stefan: code = run_stefan(cfg, s, log); break;
            case Mode::Signorini: code = run_signorini(cfg, s, log); break;
            case Mode::Verify: code = run_verify(cfg, s, log); break;
        }
    } catch (const ConfigError& e) {
        log << "config error:\n" << e.what() << '\n';
        return kExitConfig;
    } catch (const StabilityViolation& e) {
        log << "numerical failure: " << e.what() << '\n';
        s.check("stability_margin", e.margin(), 1.0, false);
        code = kExitNumerical;
    } catch (const NumericalFailure& e) {
        log << "numerical failure: " << e.what() << '\n';
        s.check("numerical_failure", kNaN, kNaN, false);
        code = kExitNumerical;
    }
    try {
        s.write(cfg);
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return code;
}

}  // namespace svi::cli
