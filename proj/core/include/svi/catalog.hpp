#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "svi/grid.hpp"

namespace svi {

/**
 * Deterministic space-time forcing f(t, xi).
 *
 * Positions (center) are fractions of the axis length; widths are absolute.
 * A nonzero omega multiplies the spatial profile by cos(omega t).
 */
enum class ForcingKind { Zero, Constant, Sine, Bump, Halves, BoundaryLayer, Field };

struct ForcingSpec {
    ForcingKind kind = ForcingKind::Zero;
    double amplitude = 0.0;
    /// Value on the right half for Halves.
    double secondary = 0.0;
    double center = 0.5;
    double width = 0.25;
    int mode = 1;
    double omega = 0.0;
    /// Nodal values for ForcingKind::Field (time-constant).
    svi::Field field;

    svi::Field eval(const Grid& grid, double t) const;
    bool time_dependent() const { return omega != 0.0; }
};

/// Initial datum x >= 0, vanishing on the boundary of Dirichlet grids.
enum class InitialKind { Zero, Sine, Cone, Cutoff, Constant, Field };

struct InitialSpec {
    InitialKind kind = InitialKind::Zero;
    double amplitude = 0.0;
    double center = 0.5;
    double radius = 0.25;
    double width = 0.1;
    svi::Field field;

    /// Throws ConfigError if the datum is negative somewhere or does not vanish on a
    /// Dirichlet boundary.
    svi::Field eval(const Grid& grid) const;
};

std::optional<ForcingKind> parse_forcing_kind(std::string_view id);
std::optional<InitialKind> parse_initial_kind(std::string_view id);
std::string to_string(ForcingKind kind);
std::string to_string(InitialKind kind);

}  // namespace svi
