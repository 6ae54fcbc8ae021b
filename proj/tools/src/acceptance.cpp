#include "svi_cli/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>

#include "svi/analysis.hpp"
#include "svi/penalty.hpp"
#include "svi/signorini.hpp"
#include "svi/stefan.hpp"
#include "svi_cli/config.hpp"
#include "svi_cli/dispatch.hpp"

namespace svi::cli {

bool CriterionResult::pass() const {
    return error.empty() && !checks.empty() && seconds <= budget_seconds &&
           std::all_of(checks.begin(), checks.end(), [](const CheckRow& c) { return c.pass; });
}

const CheckRow* CriterionResult::worst() const {
    const CheckRow* w = nullptr;
    for (const CheckRow& c : checks) {
        if (!c.pass && !w) w = &c;
    }
    if (w) return w;
    for (const CheckRow& c : checks) {
        if (c.name == key) return &c;
    }
    return checks.empty() ? nullptr : &checks.front();
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Checks = std::vector<CheckRow>;

void at_most(Checks& c, std::string name, double value, double threshold) {
    c.push_back({std::move(name), value, threshold, value <= threshold});
}

void at_least(Checks& c, std::string name, double value, double threshold) {
    c.push_back({std::move(name), value, threshold, value >= threshold});
}

std::string eps_tag(double eps) {
    std::ostringstream s;
    s << eps;
    return s.str();
}

Grid line(std::size_t n, BoundaryKind bc = BoundaryKind::Dirichlet) { return build_grid(1, {1.0}, n, bc); }

CoeffSpec single_mode(double amplitude, SpaceKind kind) {
    CoeffTerm t;
    t.amplitude = amplitude;
    t.space.kind = kind;
    t.space.mode = 1;
    return CoeffSpec{{t}};
}

/// Single constant C per problem: the largest ratio over the sweep. Linear scaling is what
/// the sweep has to demonstrate, so the spread of the ratios is checked against sqrt(10),
/// which an eps^(3/4) law would exceed over two decades.
void sweep_checks(Checks& c, const std::string& tag, const std::vector<double>& ratios, double& fitted) {
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    fitted = std::max(fitted, *hi);
    const double spread = *lo > 0.0 ? *hi / *lo : (*hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    at_most(c, tag + "_ratio_spread", spread, std::sqrt(10.0));
}

// ---------------------------------------------------------------------------------------

Checks heat_oracle() {
    const Grid g = line(255);
    const TimeGrid tg(0.1, 1000);
    InitialSpec x;
    x.kind = InitialKind::Sine;
    x.amplitude = 1.0;
    SolveConfig cfg;
    const PathSolution sol = solve_path(g, tg, {}, {}, {}, x, cfg, sample_paths(tg, 0, 1, 0));
    const double decay = std::exp(-0.1 * std::numbers::pi * std::numbers::pi);
    double err = 0.0, contact = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        err = std::max(err, std::abs(sol.y.back()[k] - decay * std::sin(std::numbers::pi * g.coord(k, 0))));
    }
    for (const Field& eta : sol.eta.slices) contact = std::max(contact, norm_max(eta));
    Checks c;
    at_most(c, "sup_error", err, 5e-3);
    at_most(c, "penalty_activity", contact, 0.0);
    return c;
}

Problem pinned_problem() {
    Problem p{line(63), TimeGrid(0.1, 100), {}, {}, {}, {}, {}};
    p.forcing.kind = ForcingKind::Constant;
    p.forcing.amplitude = -1.0;
    return p;
}

Problem mixed_contact_problem() {
    Problem p{line(63), TimeGrid(0.2, 200), single_mode(0.5, SpaceKind::Sine), {}, {}, {}, {}};
    p.forcing.kind = ForcingKind::Halves;
    p.forcing.amplitude = 1.0;
    p.forcing.secondary = -4.0;
    p.initial.kind = InitialKind::Sine;
    p.initial.amplitude = 0.2;
    return p;
}

Checks complementarity() {
    Checks c;
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    const std::pair<const char*, Problem> problems[] = {{"pinned", pinned_problem()},
                                                        {"noisy", mixed_contact_problem()}};
    for (const auto& [tag, base] : problems) {
        const BrownianPathSet paths = base.paths(5, 0);
        std::vector<ComplementarityReport> reps;
        std::vector<double> min_ratio, pair_ratio;
        for (double e : eps) {
            Problem p = base;
            p.cfg.eps = e;
            const PathSolution sol = solve_path(p.grid, p.tg, p.coeffs, p.reaction, p.forcing, p.initial, p.cfg, paths);
            reps.push_back(complementarity_report(sol.X, sol.eta_X, p.grid, p.tg));
            min_ratio.push_back(-reps.back().min_X / e);
            pair_ratio.push_back(reps.back().pairing / e);
        }
        const std::string t(tag);
        double C = 0.0;
        sweep_checks(c, t + "_min_X", min_ratio, C);
        sweep_checks(c, t + "_pairing", pair_ratio, C);
        c.push_back({t + "_fitted_C", C, kNaN, std::isfinite(C) && C > 0.0});
        for (std::size_t i = 0; i < eps.size(); ++i) {
            const std::string s = t + "_eps" + eps_tag(eps[i]);
            at_least(c, s + "_min_X", reps[i].min_X, -C * eps[i]);
            at_most(c, s + "_max_eta", reps[i].max_eta, 1e-12);
            at_most(c, s + "_pairing", reps[i].pairing, C * eps[i]);
        }
    }
    return c;
}

Checks cauchy_rate() {
    const Problem p = mixed_contact_problem();
    const RateFit fit = cauchy_rate_study(p, {1e-2, 1e-3, 1e-4, 1e-5}, p.paths(5, 0));
    Checks c;
    at_least(c, "points", static_cast<double>(fit.params.size()), 4.0);
    c.push_back({"degenerate", fit.degenerate ? 1.0 : 0.0, 0.0, !fit.degenerate});
    at_least(c, "slope", fit.slope, 0.45);
    return c;
}

Checks energy(unsigned workers) {
    Checks c;
    Problem p{line(63), TimeGrid(0.5, 500), single_mode(0.5, SpaceKind::Sine), {}, {}, {}, {}};
    p.forcing.kind = ForcingKind::Halves;
    p.forcing.amplitude = 1.0;
    p.forcing.secondary = -2.0;
    p.initial.kind = InitialKind::Sine;
    p.initial.amplitude = 1.0;
    const EnsembleStats st = ensemble_run(p, 100, 17, 10.0, workers);
    const auto ratios = st.column("energy_ratio");
    at_most(c, "ensemble_max_ratio", ratios.empty() ? kNaN : *std::max_element(ratios.begin(), ratios.end()), 10.0);
    at_most(c, "ensemble_failures", static_cast<double>(st.n_failures), 0.0);
    at_least(c, "ensemble_paths", static_cast<double>(st.n_paths), 100.0);

    Problem heat{line(63), TimeGrid(0.5, 500), {}, {}, {}, {}, {}};
    heat.initial = p.initial;
    const PathSolution sol = heat.solve(heat.paths(17, 0));
    const EnergyReport er = energy_check(heat.grid, sol, heat.initial.eval(heat.grid), heat.forcing, 0.0, 10.0);
    at_most(c, "diffusion_ratio", er.ratio, 1.0 + 10.0 * heat.tg.dt());
    return c;
}

Checks transform_consistency() {
    const Grid g = line(63);
    const CoeffSpec cs = single_mode(0.05, SpaceKind::Sine);
    InitialSpec x;
    x.kind = InitialKind::Sine;
    x.amplitude = 1.0;
    const SolveConfig cfg;
    const TimeGrid coarse(0.1, 50);
    double gap_coarse = 0.0, gap_fine = 0.0, min_x = std::numeric_limits<double>::infinity();
    const int n_paths = 100;
    for (int i = 0; i < n_paths; ++i) {
        const BrownianPathSet pc = sample_paths(coarse, 1, 23, static_cast<std::uint64_t>(i));
        const BrownianPathSet pf = refine_paths(pc);
        const TimeGrid fine = coarse.halved();
        for (int level = 0; level < 2; ++level) {
            const TimeGrid& tg = level == 0 ? coarse : fine;
            const BrownianPathSet& paths = level == 0 ? pc : pf;
            const PathSolution a = solve_path(g, tg, cs, {}, {}, x, cfg, paths);
            const PathSolution b = direct_em_solve(g, tg, cs, {}, {}, x, cfg, paths);
            Field d(g.size());
            for (std::size_t k = 0; k < g.size(); ++k) d[k] = a.X.back()[k] - b.X.back()[k];
            (level == 0 ? gap_coarse : gap_fine) += norm_l2(g, d) / n_paths;
            for (const Field& X : a.X.slices) {
                for (std::size_t k = 0; k < g.size(); ++k) min_x = std::min(min_x, X[k]);
            }
        }
    }
    Checks c;
    at_least(c, "obstacle_inactive_min_X", min_x, 0.0);
    const double factor = gap_coarse / gap_fine;
    c.push_back({"mean_gap_dt", gap_coarse, kNaN, std::isfinite(gap_coarse)});
    c.push_back({"mean_gap_dt_half", gap_fine, kNaN, std::isfinite(gap_fine)});
    at_least(c, "reduction_factor_min", factor, 1.5);
    at_most(c, "reduction_factor_max", factor, 3.0);
    return c;
}

Checks signorini() {
    Checks c;
    const Grid g = line(64, BoundaryKind::Neumann);
    const TimeGrid tg(0.1, 200);
    const CoeffSpec cs = single_mode(0.5, SpaceKind::Sine);
    ForcingSpec f;
    f.kind = ForcingKind::Constant;
    f.amplitude = -1.0;
    InitialSpec x;
    x.kind = InitialKind::Constant;
    x.amplitude = 0.02;
    const BrownianPathSet paths = sample_paths(tg, 1, 29, 0);
    const std::vector<double> eps{1e-2, 1e-3, 1e-4};
    std::vector<double> trace, ratios;
    double eta_max = 0.0;
    for (double e : eps) {
        SolveConfig cfg;
        cfg.eps = e;
        const PathSolution sol = solve_signorini(g, tg, cs, {}, f, x, cfg, paths);
        double mn = 0.0;
        for (const Field& X : sol.X.slices) {
            for (std::size_t k : g.boundary_nodes()) mn = std::min(mn, X[k]);
        }
        for (const auto& row : recover_boundary_multiplier(g, sol).values) {
            for (double v : row) eta_max = std::max(eta_max, v);
        }
        trace.push_back(mn);
        ratios.push_back(-mn / e);
    }
    double C = 0.0;
    sweep_checks(c, "trace", ratios, C);
    c.push_back({"trace_fitted_C", C, kNaN, std::isfinite(C) && C > 0.0});
    for (std::size_t i = 0; i < eps.size(); ++i) at_least(c, "trace_eps" + eps_tag(eps[i]), trace[i], -C * eps[i]);
    at_most(c, "boundary_max_eta", eta_max, 1e-12);

    // Mass in the pure-Neumann inactive regime.
    double drift = 0.0;
    for (int dim : {1, 2}) {
        const Grid gm = dim == 1 ? g : build_grid(2, {1.0, 1.0}, 24, BoundaryKind::Neumann);
        const TimeGrid tm(0.05, 50);
        InitialSpec cone;
        cone.kind = InitialKind::Cone;
        cone.amplitude = 1.0;
        cone.center = 0.4;
        cone.radius = 0.3;
        const PathSolution sol = solve_signorini(gm, tm, {}, {}, {}, cone, SolveConfig{}, sample_paths(tm, 0, 1, 0));
        const Field ones(gm.size(), 1.0);
        drift = std::max(drift, std::abs(inner(gm, sol.y.back(), ones) - inner(gm, sol.y[0], ones)) / tm.horizon());
    }
    at_most(c, "mass_drift_per_time", drift, 1e-6);

    std::size_t samples = 0, violations = 0;
    for (std::size_t n : {tg.steps() / 4, tg.steps() / 2, tg.steps()}) {
        const StepCoefficients coeffs = assemble_coefficients(g, cs, {}, f, paths, n, kDefaultMuCap);
        const CoercivityReport rep = coercivity_probe(g, coeffs, build_boundary_data(g, cs, paths, n), 1e-3, 100, n + 1);
        samples += rep.samples + rep.validation_samples;
        violations += rep.violations;
    }
    c.push_back({"delta", path_sup(paths), kNaN, true});
    at_least(c, "coercivity_samples", static_cast<double>(samples), 100.0);
    at_most(c, "coercivity_violations", static_cast<double>(violations), 0.0);
    return c;
}

Checks stefan() {
    Checks c;
    // Similarity benchmark: cold solid at the melting temperature, unit wall temperature.
    {
        const Grid g = line(400);
        const TimeGrid tg(0.25, 2500);
        SolveConfig cfg;
        cfg.eps = 1e-7;
        const StefanData sd = make_stefan_data(g, g.zeros(), 1.0, 1.0);
        const StefanSolution st = solve_stefan_svi(g, tg, {}, sd, cfg, sample_paths(tg, 0, 1, 0));
        const SimilaritySolution o = similarity_oracle(1.0, tg.horizon());
        at_most(c, "similarity_residual", o.residual, 1e-10);
        at_most(c, "similarity_rel_error", std::abs(st.fb.front.back() - o.front) / o.front, 0.02);
        c.push_back({"similarity_monotone", st.fb.monotone() ? 1.0 : 0.0, 1.0, st.fb.monotone()});
        const Trajectory back = baiocchi_forward(st.theta, st.fb, g, tg, sd.o0_mask, st.sol.mu);
        double gap = 0.0;
        for (std::size_t n = 0; n < back.size(); ++n) {
            for (std::size_t k = 0; k < g.size(); ++k) gap = std::max(gap, std::abs(back[n][k] - st.sol.y[n][k]));
        }
        at_most(c, "round_trip", gap, tg.dt() * sd.wall_temperature);
    }
    // Melting runs with and without noise: heated wall, and an initially liquid pocket.
    const TimeGrid tg(0.1, 1000);
    SolveConfig cfg;
    cfg.eps = 1e-7;
    std::size_t runs = 0, monotone = 0;
    const Grid g = line(200);
    InitialSpec pocket;
    pocket.kind = InitialKind::Cone;
    pocket.amplitude = 2.0;
    pocket.center = 0.3;
    pocket.radius = 0.15;
    const StefanData wall = make_stefan_data(g, g.zeros(), 1.0, 1.0);
    const StefanData liquid = make_stefan_data(g, pocket.eval(g), 1.0);
    for (const StefanData* sd : {&wall, &liquid}) {
        for (int path = 0; path < 4; ++path) {
            const CoeffSpec cs = path == 0 ? CoeffSpec{} : single_mode(0.3, SpaceKind::Constant);
            const StefanSolution st = solve_stefan_svi(g, tg, cs, *sd, cfg, sample_paths(tg, cs.m(), 31, path));
            ++runs;
            monotone += st.fb.monotone() ? 1 : 0;
        }
    }
    at_least(c, "melting_runs_monotone", static_cast<double>(monotone), static_cast<double>(runs));
    return c;
}

Checks noise_stats() {
    const double T = 1.0;
    const TimeGrid tg(T, 1000);
    const EnsembleStats big = noise_statistics(tg, 1, 10000, 37);
    const FunctionalStats& b = big.get("beta1_T2");
    const FunctionalStats& d = big.get("delta2");
    Checks c;
    at_most(c, "beta_T2_z_score", std::abs(b.mean - T) / std::sqrt(b.variance / 10000.0), 3.0);
    at_least(c, "delta2_mean_lower", d.mean, T);
    at_most(c, "delta2_mean_upper", d.mean, 4.0 * T);
    std::vector<double> first = big.column("beta1_T2");
    first.resize(2500);
    const double ratio = summarize("beta1_T2", first).ci_half_width / b.ci_half_width;
    at_least(c, "ci_halving_min", ratio, 1.5);
    at_most(c, "ci_halving_max", ratio, 2.5);
    return c;
}

// Small configs covering every output-producing mode.
const std::pair<const char*, const char*> kDeterminismConfigs[] = {
    {"run", R"([domain]
n = 31
[time]
T = 0.05
dt = 1e-3
[noise]
m = 1
seed = 3
mu1 = 0.5, const, sin:1
[forcing]
id = halves
amplitude = 1
secondary = -3
[initial]
id = sine
amplitude = 0.2
[run]
mode = run
trajectory_stride = 10
)"},
    {"ensemble", R"([domain]
n = 31
[time]
T = 0.05
dt = 1e-3
[noise]
m = 2
seed = 4
mu1 = 0.4, const, sin:1
mu2 = 0.2, cos:3:0, sin:2
[forcing]
id = bump
amplitude = -2
[initial]
id = sine
amplitude = 0.5
[run]
mode = ensemble
n_paths = 8
workers = 4
)"},
    {"rate_eps", R"([domain]
n = 31
[time]
T = 0.05
dt = 1e-3
[noise]
m = 1
mu1 = 0.5, const, sin:1
[penalty]
eps = 1e-2, 1e-3, 1e-4, 1e-5
[forcing]
id = constant
amplitude = -1
[run]
mode = rate-eps
)"},
    {"stefan", R"([domain]
n = 100
[time]
T = 0.02
dt = 1e-3
[noise]
m = 1
mu1 = 0.3
[penalty]
eps = 1e-6
[stefan]
theta0 = cone
theta0_amplitude = 2
theta0_center = 0.4
theta0_radius = 0.15
[run]
mode = stefan
n_paths = 3
)"},
    {"signorini", R"([domain]
n = 32
bc = neumann
[time]
T = 0.02
dt = 1e-3
[noise]
m = 1
mu1 = 0.5, const, sin:1
[forcing]
id = constant
amplitude = -1
[initial]
id = constant
amplitude = 0.05
[run]
mode = signorini
trajectory_stride = 5
)"},
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Checks determinism(const std::filesystem::path& scratch) {
    Checks c;
    std::filesystem::remove_all(scratch);
    for (const auto& [name, text] : kDeterminismConfigs) {
        std::vector<std::filesystem::path> dirs;
        for (const char* run : {"a", "b"}) {
            RunConfig cfg = parse_config_text(text);
            cfg.out_dir = scratch / run / name;
            cfg.quiet = true;
            std::ostringstream sink;
            const int code = dispatch(cfg, sink);
            at_most(c, std::string(name) + "_exit_" + run, code, 0.0);
            dirs.push_back(cfg.out_dir);
        }
        std::vector<std::string> files;
        for (const auto& entry : std::filesystem::directory_iterator(dirs[0])) files.push_back(entry.path().filename().string());
        std::sort(files.begin(), files.end());
        std::size_t other = 0;
        for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dirs[1])) ++other;
        bool same = !files.empty() && files.size() == other;
        for (const std::string& f : files) same = same && slurp(dirs[0] / f) == slurp(dirs[1] / f);
        c.push_back({std::string(name) + "_identical_files", static_cast<double>(files.size()), 1.0, same});
    }
    std::filesystem::remove_all(scratch);
    return c;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
    const std::filesystem::path scratch =
        opts.scratch.empty() ? std::filesystem::temp_directory_path() / "svilab_acceptance" : opts.scratch;
    struct Entry {
        int id;
        const char* title;
        double budget;
        const char* key;
        std::function<Checks()> run;
    };
    const std::vector<Entry> all{
        {1, "heat-equation oracle", 5.0, "sup_error", heat_oracle},
        {2, "complementarity", 60.0, "noisy_pairing_ratio_spread", complementarity},
        {3, "penalization Cauchy rate", 120.0, "slope", cauchy_rate},
        {4, "energy estimates", 300.0, "ensemble_max_ratio", [&] { return energy(opts.workers); }},
        {5, "transform consistency", 300.0, "reduction_factor_min", transform_consistency},
        {6, "Signorini variant", 120.0, "coercivity_violations", signorini},
        {7, "Stefan benchmark", 120.0, "similarity_rel_error", stefan},
        {8, "noise statistics", 60.0, "delta2_mean_upper", noise_stats},
        {9, "determinism", 120.0, "ensemble_identical_files", [&] { return determinism(scratch); }},
    };
    std::vector<CriterionResult> out;
    for (const Entry& e : all) {
        if (!opts.only.empty() && std::find(opts.only.begin(), opts.only.end(), e.id) == opts.only.end()) continue;
        CriterionResult r;
        r.id = e.id;
        r.title = e.title;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            r.checks = e.run();
        } catch (const std::exception& ex) {
            r.error = ex.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.budget_seconds = e.budget;
        r.key = e.key;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace svi::cli
