#include "svi/penalty.hpp"

#include <cmath>

#include "svi/errors.hpp"

namespace svi {

PenaltyParam::PenaltyParam(double eps) : eps_(eps) {
    if (!(eps > 0.0) || !std::isfinite(eps)) throw ConfigError("penalty.eps must be > 0");
}

double graph_distance(double r, double eta) {
    // The graph is the union of the half-lines {(s, 0): s >= 0} and {(0, e): e <= 0}.
    const double to_horizontal = r >= 0.0 ? std::abs(eta) : std::hypot(r, eta);
    const double to_vertical = eta <= 0.0 ? std::abs(r) : std::hypot(r, eta);
    return std::min(to_horizontal, to_vertical);
}

}  // namespace svi
