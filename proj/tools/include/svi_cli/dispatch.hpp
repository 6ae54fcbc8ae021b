#pragma once

#include <iosfwd>

#include "svi_cli/config.hpp"

namespace svi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerify = 3;

/// Runs the configured mode and writes its CSVs into cfg.out_dir. Config problems surface
/// as exit 1, numerical failures as exit 2 (with a diagnostic row in summary.csv), failed
/// checks in verify mode as exit 3. Progress goes to log unless cfg.quiet.
int dispatch(const RunConfig& cfg, std::ostream& log);

}  // namespace svi::cli
