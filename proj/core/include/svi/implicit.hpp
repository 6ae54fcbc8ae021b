#pragma once

#include <memory>
#include <span>
#include <vector>

#include "svi/grid.hpp"

namespace svi {

/**
 * The linear part I - c L_h of an implicit step, L_h the grid Laplacian of
 * apply_laplacian and c = dt * theta, with an optional per-node diagonal shift.
 *
 * 1D systems are solved by the Thomas algorithm. 2D systems are scaled by the
 * quadrature weights (which makes the Neumann-reflection stencil symmetric) and
 * solved by Jacobi-preconditioned conjugate gradients.
 */
class ImplicitOperator {
public:
    ImplicitOperator(const Grid& grid, double c, double cg_tol = 1e-13);
    ~ImplicitOperator();
    ImplicitOperator(ImplicitOperator&&) noexcept;
    ImplicitOperator& operator=(ImplicitOperator&&) noexcept;

    /// (I - c L_h + diag(shift)) y.
    Field apply(std::span<const double> shift, const Field& y) const;
    /// Solves (I - c L_h + diag(shift)) y = rhs.
    Field solve(std::span<const double> shift, const Field& rhs) const;

    const Grid& grid() const { return grid_; }
    double coefficient() const { return c_; }

private:
    struct Sparse;
    Grid grid_;
    double c_;
    double cg_tol_;
    std::unique_ptr<Sparse> sparse_;
};

struct NewtonResult {
    Field y;
    int iterations = 0;
    double residual = 0.0;
};

/**
 * Semismooth Newton for the monotone piecewise-linear system
 *
 *     (I - c L_h + diag(fixed)) y + penalty .* beta_eps(y) = rhs,
 *
 * iterating on the active set {y < 0}. Terminates when the active set repeats.
 * Throws NumericalFailure after max_iter linear solves or if the final residual
 * (max norm, relative to 1 + |rhs|_inf) exceeds tol.
 */
NewtonResult solve_penalized(const ImplicitOperator& op, std::span<const double> fixed,
                             std::span<const double> penalty, double eps, const Field& rhs,
                             const Field& guess, double tol, int max_iter);

}  // namespace svi
