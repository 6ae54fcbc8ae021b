#include "svi_cli/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace svi::cli {

namespace {

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) out += '\n';
        out += l;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && !s.empty();
}

const std::set<std::string> kSections{"domain", "time",    "noise", "reaction", "penalty",
                                      "forcing", "initial", "stefan", "run",     "output"};

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Reader {
public:
    std::map<std::string, std::map<std::string, Entry>> table;
    std::vector<std::string> errors;

    void error(const std::string& section, const std::string& key, const std::string& msg) {
        errors.push_back(section + "." + key + ": " + msg);
    }

    Entry* find(const std::string& section, const std::string& key) {
        auto s = table.find(section);
        if (s == table.end()) return nullptr;
        auto k = s->second.find(key);
        if (k == s->second.end()) return nullptr;
        k->second.used = true;
        return &k->second;
    }

    template <class T>
    void number(const std::string& section, const std::string& key, T& out) {
        if (Entry* e = find(section, key)) {
            T v{};
            if (parse_number(e->value, v)) {
                out = v;
            } else {
                error(section, key, "cannot parse '" + e->value + "' as a number");
            }
        }
    }

    template <class T>
    void list(const std::string& section, const std::string& key, std::vector<T>& out) {
        if (Entry* e = find(section, key)) {
            std::vector<T> vals;
            for (const std::string& item : split(e->value, ',')) {
                T v{};
                if (!parse_number(item, v)) {
                    error(section, key, "cannot parse list item '" + item + "'");
                    return;
                }
                vals.push_back(v);
            }
            out = std::move(vals);
        }
    }

    void text(const std::string& section, const std::string& key, std::string& out) {
        if (Entry* e = find(section, key)) out = e->value;
    }
};

std::optional<TimeFactor> parse_time_factor(const std::string& s) {
    const auto parts = split(s, ':');
    TimeFactor tf;
    if (parts[0] == "const" && parts.size() == 1) return tf;
    if ((parts[0] == "lin" || parts[0] == "cos") && parts.size() == 3) {
        tf.kind = parts[0] == "lin" ? TimeKind::Linear : TimeKind::Cosine;
        if (parse_number(parts[1], tf.c0) && parse_number(parts[2], tf.c1)) return tf;
    }
    return std::nullopt;
}

std::optional<SpaceFactor> parse_space_factor(const std::string& s) {
    const auto parts = split(s, ':');
    SpaceFactor sf;
    if (parts[0] == "const" && parts.size() == 1) return sf;
    if ((parts[0] == "sin" || parts[0] == "cos") && parts.size() == 2) {
        sf.kind = parts[0] == "sin" ? SpaceKind::Sine : SpaceKind::Cosine;
        if (parse_number(parts[1], sf.mode) && sf.mode >= 0) return sf;
    }
    if (parts[0] == "poly" && parts.size() == 4) {
        sf.kind = SpaceKind::Polynomial;
        if (parse_number(parts[1], sf.poly[0]) && parse_number(parts[2], sf.poly[1]) &&
            parse_number(parts[3], sf.poly[2])) {
            return sf;
        }
    }
    return std::nullopt;
}

void read_initial(Reader& r, const std::string& section, const std::string& prefix, InitialSpec& spec) {
    std::string id;
    r.text(section, prefix + "id", id);
    if (!id.empty()) {
        if (auto kind = parse_initial_kind(id)) {
            spec.kind = *kind;
        } else {
            r.error(section, prefix + "id",
                    "unknown initial datum '" + id + "' (catalog: zero, sine, cone, cutoff, constant)");
        }
    }
    r.number(section, prefix + "amplitude", spec.amplitude);
    r.number(section, prefix + "center", spec.center);
    r.number(section, prefix + "radius", spec.radius);
    r.number(section, prefix + "width", spec.width);
}

}  // namespace

ConfigErrors::ConfigErrors(std::vector<std::string> messages)
    : ConfigError(join_lines(messages)), messages_(std::move(messages)) {}

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Run: return "run";
        case Mode::Ensemble: return "ensemble";
        case Mode::RateEps: return "rate-eps";
        case Mode::RateMesh: return "rate-mesh";
        case Mode::Stefan: return "stefan";
        case Mode::Signorini: return "signorini";
        case Mode::Verify: return "verify";
    }
    return "run";
}

SolveConfig RunConfig::solve_config() const {
    SolveConfig c;
    c.theta = theta;
    c.eps = eps.front();
    c.newton_tol = newton_tol;
    c.newton_max = newton_max;
    c.mu_cap = mu_cap;
    c.max_halvings = max_halvings;
    return c;
}

Grid RunConfig::grid() const { return build_grid(dim, lengths, n, bc); }

TimeGrid RunConfig::time_grid() const { return TimeGrid::from_step(horizon, dt); }

Problem RunConfig::problem() const {
    return Problem{grid(), time_grid(), coeffs, reaction, forcing, initial, solve_config()};
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void stamp_hash(RunConfig& cfg, std::string_view text) {
    std::ostringstream s;
    s << text << "\n#seed=" << cfg.seed << "\n#paths=" << cfg.n_paths;
    std::ostringstream hex;
    hex << std::hex << fnv1a64(s.str());
    cfg.hash = hex.str();
}

void validate(const RunConfig& c) {
    std::vector<std::string> errs;
    auto err = [&](const std::string& key, const std::string& msg) { errs.push_back(key + ": " + msg); };

    if (c.dim != 1 && c.dim != 2) err("domain.dim", "must be 1 or 2");
    if (c.lengths.size() != static_cast<std::size_t>(c.dim)) err("domain.lengths", "needs one value per dimension");
    for (double l : c.lengths) {
        if (!(l > 0.0)) err("domain.lengths", "must be > 0");
    }
    if (c.n < 3) err("domain.n", "must be >= 3");
    if (!(c.horizon > 0.0)) err("time.T", "must be > 0");
    if (!(c.dt > 0.0)) err("time.dt", "must be > 0");
    if (c.dt > c.horizon) err("time.dt", "must not exceed time.T");
    if (!(c.theta >= 0.5 && c.theta <= 1.0)) err("time.theta", "must lie in [0.5, 1]");
    if (c.eps.empty()) err("penalty.eps", "needs at least one value");
    for (double e : c.eps) {
        if (!(e > 0.0)) {
            errs.push_back("penalty.eps must be > 0");
            break;
        }
    }
    if (c.reaction.kind != ReactionKind::Zero && !(c.reaction.alpha >= 0.0)) err("reaction.alpha", "must be >= 0");
    if (!(c.rho > 0.0)) err("stefan.rho", "must be > 0");
    if (!(c.wall_temperature >= 0.0)) err("stefan.wall_temperature", "must be >= 0");
    if (c.n_paths < 1) err("run.n_paths", "must be >= 1");
    if (!(c.slack > 0.0)) err("run.slack", "must be > 0");
    if (!(c.newton_tol > 0.0)) err("run.newton_tol", "must be > 0");
    if (c.newton_max < 1) err("run.newton_max", "must be >= 1");
    if (!(c.mu_cap > 0.0)) err("run.mu_cap", "must be > 0");
    if (c.max_halvings < 0) err("run.max_halvings", "must be >= 0");
    if (c.workers < 1) err("run.workers", "must be >= 1");
    if (c.trajectory_stride < 1) err("run.trajectory_stride", "must be >= 1");

    const bool neumann = c.bc == BoundaryKind::Neumann;
    switch (c.mode) {
        case Mode::Signorini:
            if (!neumann) err("domain.bc", "signorini mode needs bc = neumann");
            break;
        case Mode::Verify: break;
        default:
            if (neumann) err("domain.bc", "mode " + to_string(c.mode) + " needs bc = dirichlet");
    }
    if (c.mode == Mode::Ensemble && c.n_paths < 2) err("run.n_paths", "ensemble mode needs at least 2 paths");
    if (c.mode == Mode::RateEps && c.eps.size() < 4) err("penalty.eps", "rate-eps needs at least 4 values");
    if (c.mode == Mode::RateMesh) {
        if (c.mesh_n.size() < 3) err("run.mesh_n", "rate-mesh needs at least 3 grid sizes");
        for (std::size_t i = 1; i < c.mesh_n.size(); ++i) {
            if (c.mesh_n[i] != 2 * c.mesh_n[i - 1] + 1) err("run.mesh_n", "sizes must be nested: n, 2n+1, 4n+3, ...");
        }
    }
    if (c.mode == Mode::Stefan && c.wall_temperature > 0.0 && c.dim != 1) {
        err("stefan.wall_temperature", "only supported in 1D");
    }

    // Catalog data must be admissible on the configured grid.
    if (errs.empty()) {
        try {
            const Grid g = c.grid();
            try {
                c.initial.eval(g);
            } catch (const ConfigError& e) {
                err("initial.id", e.what());
            }
            if (c.mode == Mode::Stefan) {
                try {
                    c.theta0.eval(g);
                } catch (const ConfigError& e) {
                    err("stefan.theta0", e.what());
                }
            }
        } catch (const ConfigError& e) {
            err("domain", e.what());
        }
    }
    if (!errs.empty()) throw ConfigErrors(std::move(errs));
}

RunConfig parse_config_text(std::string_view text) {
    Reader r;
    std::string section;
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                r.errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
                continue;
            }
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (!kSections.count(section)) {
                r.errors.push_back("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            }
            r.table[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            r.errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        if (section.empty()) {
            r.errors.push_back("line " + std::to_string(line_no) + ": key outside of any section");
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        auto [it, inserted] = r.table[section].emplace(key, Entry{std::string(trim(line.substr(eq + 1))), line_no});
        if (!inserted) r.error(section, key, "duplicate key (line " + std::to_string(line_no) + ")");
    }

    RunConfig c;
    // [domain]
    r.number("domain", "dim", c.dim);
    if (c.dim == 2) c.lengths = {1.0, 1.0};
    r.list("domain", "lengths", c.lengths);
    r.number("domain", "n", c.n);
    std::string bc;
    r.text("domain", "bc", bc);
    if (bc == "neumann") {
        c.bc = BoundaryKind::Neumann;
    } else if (!bc.empty() && bc != "dirichlet") {
        r.error("domain", "bc", "must be dirichlet or neumann");
    }

    // [time]
    r.number("time", "T", c.horizon);
    r.number("time", "dt", c.dt);
    r.number("time", "theta", c.theta);

    // [noise]
    std::size_t m = 0;
    r.number("noise", "m", m);
    r.number("noise", "seed", c.seed);
    c.coeffs.terms.assign(m, CoeffTerm{});
    if (auto s = r.table.find("noise"); s != r.table.end()) {
        for (auto& [key, entry] : s->second) {
            if (key.rfind("mu", 0) != 0 || key.size() < 3) continue;
            std::size_t k = 0;
            if (!parse_number(std::string_view(key).substr(2), k) || k < 1) continue;
            entry.used = true;
            if (k > m) {
                r.error("noise", key, "index exceeds noise.m = " + std::to_string(m));
                continue;
            }
            const auto parts = split(entry.value, ',');
            CoeffTerm term;
            bool ok = parse_number(parts[0], term.amplitude) && parts.size() <= 3;
            if (ok && parts.size() >= 2) {
                if (auto tf = parse_time_factor(parts[1])) term.time = *tf; else ok = false;
            }
            if (ok && parts.size() == 3) {
                if (auto sf = parse_space_factor(parts[2])) term.space = *sf; else ok = false;
            }
            if (!ok) {
                r.error("noise", key,
                        "expected 'amplitude[, const|lin:c0:c1|cos:c0:c1[, const|poly:a:b:c|sin:k|cos:k]]', got '" +
                            entry.value + "'");
                continue;
            }
            c.coeffs.terms[k - 1] = term;
        }
    }

    // [reaction]
    std::string rk;
    r.text("reaction", "kind", rk);
    if (rk == "linear") {
        c.reaction.kind = ReactionKind::Linear;
    } else if (rk == "saturating") {
        c.reaction.kind = ReactionKind::Saturating;
    } else if (!rk.empty() && rk != "zero") {
        r.error("reaction", "kind", "unknown reaction '" + rk + "' (zero, linear, saturating)");
    }
    r.number("reaction", "alpha", c.reaction.alpha);

    // [penalty]
    r.list("penalty", "eps", c.eps);

    // [forcing]
    std::string fid;
    r.text("forcing", "id", fid);
    if (!fid.empty()) {
        if (auto kind = parse_forcing_kind(fid)) {
            c.forcing.kind = *kind;
        } else {
            r.error("forcing", "id",
                    "unknown forcing '" + fid + "' (catalog: zero, constant, sine, bump, halves, boundary_layer)");
        }
    }
    r.number("forcing", "amplitude", c.forcing.amplitude);
    r.number("forcing", "secondary", c.forcing.secondary);
    r.number("forcing", "center", c.forcing.center);
    r.number("forcing", "width", c.forcing.width);
    r.number("forcing", "mode", c.forcing.mode);
    r.number("forcing", "omega", c.forcing.omega);

    // [initial]
    read_initial(r, "initial", "", c.initial);

    // [stefan]
    std::string t0;
    r.text("stefan", "theta0", t0);
    if (!t0.empty()) {
        if (auto kind = parse_initial_kind(t0)) {
            c.theta0.kind = *kind;
        } else {
            r.error("stefan", "theta0", "unknown temperature profile '" + t0 + "' (catalog: zero, sine, cone, cutoff, constant)");
        }
    }
    r.number("stefan", "theta0_amplitude", c.theta0.amplitude);
    r.number("stefan", "theta0_center", c.theta0.center);
    r.number("stefan", "theta0_radius", c.theta0.radius);
    r.number("stefan", "theta0_width", c.theta0.width);
    r.number("stefan", "rho", c.rho);
    r.number("stefan", "wall_temperature", c.wall_temperature);
    r.number("stefan", "tol_fb", c.tol_fb);

    // [run]
    std::string mode;
    r.text("run", "mode", mode);
    if (!mode.empty()) {
        bool found = false;
        for (Mode md : {Mode::Run, Mode::Ensemble, Mode::RateEps, Mode::RateMesh, Mode::Stefan, Mode::Signorini,
                        Mode::Verify}) {
            if (to_string(md) == mode) {
                c.mode = md;
                found = true;
            }
        }
        if (!found) {
            r.error("run", "mode", "unknown mode '" + mode + "' (run, ensemble, rate-eps, rate-mesh, stefan, signorini, verify)");
        }
    }
    r.number("run", "n_paths", c.n_paths);
    r.number("run", "path_id", c.path_id);
    r.number("run", "slack", c.slack);
    r.number("run", "newton_tol", c.newton_tol);
    r.number("run", "newton_max", c.newton_max);
    r.number("run", "mu_cap", c.mu_cap);
    r.number("run", "max_halvings", c.max_halvings);
    r.number("run", "workers", c.workers);
    r.list("run", "mesh_n", c.mesh_n);
    r.number("run", "trajectory_stride", c.trajectory_stride);

    // [output]
    std::string dir;
    r.text("output", "directory", dir);
    if (!dir.empty()) c.out_dir = dir;

    for (const auto& [sec, keys] : r.table) {
        if (!kSections.count(sec)) continue;
        for (const auto& [key, entry] : keys) {
            if (!entry.used) r.error(sec, key, "unknown key (line " + std::to_string(entry.line) + ")");
        }
    }

    // Syntax and range problems are reported together.
    std::vector<std::string> errors = std::move(r.errors);
    try {
        validate(c);
    } catch (const ConfigErrors& e) {
        errors.insert(errors.end(), e.messages().begin(), e.messages().end());
    }
    if (!errors.empty()) throw ConfigErrors(std::move(errors));
    stamp_hash(c, text);
    return c;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigErrors({"cannot read config file '" + path.string() + "'"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace svi::cli
