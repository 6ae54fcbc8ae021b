#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "svi_cli/config.hpp"
#include "svi_cli/dispatch.hpp"

int main(int argc, char** argv) {
    using namespace svi::cli;
    CLI::App app{"svilab: penalized path-wise solver for stochastic obstacle problems"};
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> paths;
    std::optional<std::string> out;
    bool quiet = false;
    app.add_option("--config", config_path, "Configuration file")->required();
    app.add_option("--seed", seed, "Override [noise] seed");
    app.add_option("--paths", paths, "Override [run] n_paths");
    app.add_option("--out", out, "Override [output] directory");
    app.add_flag("--quiet", quiet, "Suppress progress output");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        std::ifstream in(config_path, std::ios::binary);
        if (!in) throw ConfigErrors({"cannot read config file '" + config_path + "'"});
        std::ostringstream text;
        text << in.rdbuf();
        RunConfig cfg = parse_config_text(text.str());
        if (seed) cfg.seed = *seed;
        if (paths) cfg.n_paths = *paths;
        if (out) cfg.out_dir = *out;
        cfg.quiet = quiet;
        validate(cfg);
        stamp_hash(cfg, text.str());
        return dispatch(cfg, std::cerr);
    } catch (const svi::ConfigError& e) {
        std::cerr << "config error:\n" << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
