#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "svi/errors.hpp"
#include "svi/pathsolver.hpp"

namespace svi::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Every validation problem found in one config, one message per line.
class ConfigErrors : public ConfigError {
public:
    explicit ConfigErrors(std::vector<std::string> messages);
    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
};

enum class Mode { Run, Ensemble, RateEps, RateMesh, Stefan, Signorini, Verify };

std::string to_string(Mode mode);

struct RunConfig {
    // [domain]
    int dim = 1;
    std::vector<double> lengths{1.0};
    std::size_t n = 63;
    BoundaryKind bc = BoundaryKind::Dirichlet;

    // [time]
    double horizon = 0.1;
    double dt = 1e-3;
    double theta = 1.0;

    // [noise]
    CoeffSpec coeffs;
    std::uint64_t seed = 1;

    ReactionSpec reaction;

    // [penalty]; the first entry is used outside rate-eps.
    std::vector<double> eps{1e-3};

    ForcingSpec forcing;
    InitialSpec initial;

    // [stefan]
    InitialSpec theta0;
    double rho = 1.0;
    double wall_temperature = 0.0;
    /// <= 0 selects 10 eps.
    double tol_fb = 0.0;

    // [run]
    Mode mode = Mode::Run;
    std::size_t n_paths = 1;
    std::uint64_t path_id = 0;
    double slack = 10.0;
    double newton_tol = 1e-9;
    int newton_max = 200;
    double mu_cap = kDefaultMuCap;
    int max_halvings = 3;
    unsigned workers = 1;
    std::vector<std::size_t> mesh_n;
    /// Write every stride-th time level to trajectory.csv.
    std::size_t trajectory_stride = 1;

    // [output]
    std::filesystem::path out_dir = ".";

    bool quiet = false;
    /// FNV-1a of the config text plus command-line overrides, hex.
    std::string hash;

    SolveConfig solve_config() const;
    Grid grid() const;
    TimeGrid time_grid() const;
    Problem problem() const;
};

/// Parses the line-oriented `[section]` / `key = value` format. Throws ConfigErrors listing
/// every problem (unknown sections and keys included).
RunConfig parse_config_text(std::string_view text);

/// Reads and parses a file; unreadable files raise ConfigErrors too.
RunConfig parse_config(const std::filesystem::path& path);

/// Re-validates after command-line overrides.
void validate(const RunConfig& cfg);

/// Recomputes cfg.hash from the config text and the current overrides.
void stamp_hash(RunConfig& cfg, std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace svi::cli
