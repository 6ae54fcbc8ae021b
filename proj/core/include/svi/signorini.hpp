#pragma once

#include <cstdint>
#include <vector>

#include "svi/pathsolver.hpp"

namespace svi {

/**
 * Boundary geometry of a Neumann grid plus the normal derivative of mu at one time.
 *
 * Each boundary node carries one outward normal per axis on whose end it sits
 * (two at 2D corners); quantities along those normals are combined with the
 * boundary-length weight each face contributes.
 */
struct BoundaryData {
    std::vector<std::size_t> nodes;
    /// Boundary measure attributed to each node (grid.boundary_weight).
    std::vector<double> weight;
    /// Ratio boundary_weight / cell weight; scales flux terms into the nodal equation.
    std::vector<double> flux_scale;
    /// Outward normal derivative of mu at each boundary node.
    std::vector<double> mu_normal;
};

/// Boundary data with mu_normal = 0.
BoundaryData build_boundary_data(const Grid& grid);

/// Boundary data with the analytic normal derivative of mu(t_n).
BoundaryData build_boundary_data(const Grid& grid, const CoeffSpec& cs, const BrownianPathSet& paths,
                                 std::size_t n);

/// Outward normal derivative of u at each boundary node (second-order one-sided stencils,
/// face-weighted average at corners).
std::vector<double> normal_derivative(const Grid& grid, const BoundaryData& bd, const Field& u);

/**
 * One theta-step of the penalized transformed Signorini problem. The boundary flux
 * dy/dnu = -(dmu/dnu) y - beta_eps(y) enters through the reflection ghost at the new
 * time level and is resolved in the same semismooth Newton loop.
 */
StepResult step_signorini(const Grid& grid, const Field& y_n, const StepCoefficients& coeffs,
                          const BoundaryData& bd, double dt, const SolveConfig& cfg);

/// Path solve on a Neumann grid. The multiplier trajectories are nonzero on boundary nodes only.
PathSolution solve_signorini(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const ReactionSpec& rs,
                             const ForcingSpec& f, const InitialSpec& x, const SolveConfig& cfg,
                             const BrownianPathSet& paths);

/// Pointwise form of the penalized operator: -L_h y + F~(y) + g . grad y plus the boundary
/// flux (beta_eps(y) + mu_nu y) scaled into boundary cells.
Field apply_signorini_operator(const Grid& grid, const StepCoefficients& coeffs, const BoundaryData& bd,
                               const Field& y, double eps);

/// <A_eps y, phi> assembled from the Dirichlet form, interior quadrature and boundary quadrature.
double assemble_form_value(const Grid& grid, const StepCoefficients& coeffs, const BoundaryData& bd,
                           const Field& y, const Field& phi, double eps);

struct CoercivityReport {
    /// Boundedness |<Ay, phi>| <= C1 |y|_V |phi|_V (largest observed ratio).
    double c1 = 0.0;
    /// <Ay, y> >= C2 |grad y|^2 - C3 |y|^2.
    double c2 = 0.0;
    double c3 = 0.0;
    /// <Ay - Ay', y - y'> >= -C4 |y - y'|^2.
    double c4 = 0.0;
    std::size_t samples = 0;
    /// Held-out structured probes checked against the fitted (C2, C3).
    std::size_t validation_samples = 0;
    std::size_t violations = 0;
};

/**
 * Fits the operator constants on random fields (Fourier series, boundary layers,
 * constants), then counts structured probes (cosine modes, fixed boundary layers)
 * that violate the fitted coercivity bound. Never throws on numerical grounds.
 */
CoercivityReport coercivity_probe(const Grid& grid, const StepCoefficients& coeffs, const BoundaryData& bd,
                                  double eps, std::size_t n_samples, std::uint64_t seed = 1,
                                  bool include_penalty = true);

struct BoundaryTrajectory {
    std::vector<std::size_t> nodes;
    std::vector<double> times;
    /// values[n][b]: multiplier at boundary node nodes[b] and time times[n].
    std::vector<std::vector<double>> values;

    double min() const;
    /// Space-time integral of the squared multiplier over the boundary (left-endpoint in time).
    double squared_integral(const Grid& grid, double dt) const;
};

/// beta_eps(y) restricted to the boundary nodes.
BoundaryTrajectory recover_boundary_multiplier(const Grid& grid, const PathSolution& sol);

}  // namespace svi
