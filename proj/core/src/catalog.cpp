#include "svi/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "svi/errors.hpp"

namespace svi {

namespace {

double dist_to_boundary(const Grid& grid, std::array<double, 2> p) {
    double d = std::min(p[0], grid.length(0) - p[0]);
    if (grid.dim() == 2) d = std::min({d, p[1], grid.length(1) - p[1]});
    return std::max(d, 0.0);
}

double sine_profile(const Grid& grid, std::array<double, 2> p, int mode) {
    double v = 1.0;
    for (int a = 0; a < grid.dim(); ++a) v *= std::sin(mode * std::numbers::pi * p[a] / grid.length(a));
    return v;
}

}  // namespace

Field ForcingSpec::eval(const Grid& grid, double t) const {
    const double tf = omega != 0.0 ? std::cos(omega * t) : 1.0;
    if (kind == ForcingKind::Field) {
        require_matches(grid, field, "forcing field");
        Field out = field;
        if (tf != 1.0) {
            for (double& v : out) v *= tf;
        }
        return out;
    }
    Field out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto p = grid.point(k);
        double v = 0.0;
        switch (kind) {
            case ForcingKind::Zero: v = 0.0; break;
            case ForcingKind::Constant: v = amplitude; break;
            case ForcingKind::Sine: v = amplitude * sine_profile(grid, p, mode); break;
            case ForcingKind::Bump: {
                double r2 = 0.0;
                for (int a = 0; a < grid.dim(); ++a) {
                    const double z = (p[a] - center * grid.length(a)) / width;
                    r2 += z * z;
                }
                const double s = std::max(0.0, 1.0 - r2);
                v = amplitude * s * s;
                break;
            }
            case ForcingKind::Halves: v = p[0] < 0.5 * grid.length(0) ? amplitude : secondary; break;
            case ForcingKind::BoundaryLayer: v = amplitude * std::exp(-dist_to_boundary(grid, p) / width); break;
            case ForcingKind::Field: break;
        }
        out[k] = tf * v;
    }
    return out;
}

Field InitialSpec::eval(const Grid& grid) const {
    const bool dirichlet = grid.bc() == BoundaryKind::Dirichlet;
    if (kind != InitialKind::Field && kind != InitialKind::Zero && !(amplitude >= 0.0)) {
        throw ConfigError("initial: amplitude must be >= 0");
    }
    Field out(grid.size());
    switch (kind) {
        case InitialKind::Zero: break;
        case InitialKind::Sine:
            out = grid.sample([&](double a, double b) { return amplitude * sine_profile(grid, {a, b}, 1); });
            break;
        case InitialKind::Cone: {
            if (!(radius > 0.0)) throw ConfigError("initial: cone radius must be > 0");
            for (int a = 0; a < grid.dim(); ++a) {
                const double c = center * grid.length(a);
                if (dirichlet && (c - radius < 0.0 || c + radius > grid.length(a))) {
                    throw ConfigError("initial: cone support must lie inside the domain");
                }
            }
            out = grid.sample([&](double a, double b) {
                double r2 = std::pow(a - center * grid.length(0), 2);
                if (grid.dim() == 2) r2 += std::pow(b - center * grid.length(1), 2);
                return amplitude * std::max(0.0, 1.0 - std::sqrt(r2) / radius);
            });
            break;
        }
        case InitialKind::Cutoff: {
            if (!(width > 0.0)) throw ConfigError("initial: cutoff width must be > 0");
            out = grid.sample([&](double a, double b) {
                const std::array<double, 2> p{a, b};
                double v = amplitude;
                for (int d = 0; d < grid.dim(); ++d) {
                    v *= std::clamp(std::min(p[d], grid.length(d) - p[d]) / width, 0.0, 1.0);
                }
                return v;
            });
            break;
        }
        case InitialKind::Constant:
            if (dirichlet && amplitude != 0.0) {
                throw ConfigError("initial: constant datum does not vanish on a Dirichlet boundary");
            }
            out = Field(grid.size(), amplitude);
            break;
        case InitialKind::Field:
            require_matches(grid, field, "initial field");
            out = field;
            break;
    }
    for (double v : out) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("initial: datum must be finite and >= 0");
    }
    return out;
}

std::optional<ForcingKind> parse_forcing_kind(std::string_view id) {
    if (id == "zero") return ForcingKind::Zero;
    if (id == "constant") return ForcingKind::Constant;
    if (id == "sine") return ForcingKind::Sine;
    if (id == "bump") return ForcingKind::Bump;
    if (id == "halves") return ForcingKind::Halves;
    if (id == "boundary_layer") return ForcingKind::BoundaryLayer;
    return std::nullopt;
}

std::optional<InitialKind> parse_initial_kind(std::string_view id) {
    if (id == "zero") return InitialKind::Zero;
    if (id == "sine") return InitialKind::Sine;
    if (id == "cone") return InitialKind::Cone;
    if (id == "cutoff") return InitialKind::Cutoff;
    if (id == "constant") return InitialKind::Constant;
    return std::nullopt;
}

std::string to_string(ForcingKind kind) {
    switch (kind) {
        case ForcingKind::Zero: return "zero";
        case ForcingKind::Constant: return "constant";
        case ForcingKind::Sine: return "sine";
        case ForcingKind::Bump: return "bump";
        case ForcingKind::Halves: return "halves";
        case ForcingKind::BoundaryLayer: return "boundary_layer";
        case ForcingKind::Field: return "field";
    }
    return "?";
}

std::string to_string(InitialKind kind) {
    switch (kind) {
        case InitialKind::Zero: return "zero";
        case InitialKind::Sine: return "sine";
        case InitialKind::Cone: return "cone";
        case InitialKind::Cutoff: return "cutoff";
        case InitialKind::Constant: return "constant";
        case InitialKind::Field: return "field";
    }
    return "?";
}

}  // namespace svi
