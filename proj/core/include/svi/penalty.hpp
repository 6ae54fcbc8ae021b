#pragma once

#include <algorithm>

namespace svi {

/// Penalty parameter eps > 0.
class PenaltyParam {
public:
    explicit PenaltyParam(double eps);
    double eps() const { return eps_; }

private:
    double eps_;
};

// The obstacle graph: beta(r) = {0} for r > 0, beta(0) = (-inf, 0], beta(r) empty for r < 0.

/// (1 + eps beta)^{-1} r, the projection onto [0, inf). Independent of eps.
inline double resolvent(double r, double /*eps*/) { return std::max(r, 0.0); }

/// Yosida approximation -r^- / eps.
inline double beta_eps(double r, double eps) { return std::min(r, 0.0) / eps; }

/// Potential of beta_eps: integral of beta_eps from 0 to r.
inline double j_eps(double r, double eps) {
    const double m = std::min(r, 0.0);
    return m * m / (2.0 * eps);
}

/// Exact membership eta in beta(r).
inline bool graph_contains(double r, double eta) {
    if (r > 0.0) return eta == 0.0;
    if (r == 0.0) return eta <= 0.0;
    return false;
}

/// Euclidean distance from (r, eta) to the graph of beta.
double graph_distance(double r, double eta);

}  // namespace svi
