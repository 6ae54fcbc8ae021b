#include "svi/implicit.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <string>

#include "svi/errors.hpp"
#include "svi/penalty.hpp"

namespace svi {

struct ImplicitOperator::Sparse {
    Eigen::SparseMatrix<double> base;  // W (I - c L_h)
    Eigen::VectorXd weight;
};

ImplicitOperator::ImplicitOperator(const Grid& grid, double c, double cg_tol)
    : grid_(grid), c_(c), cg_tol_(cg_tol) {
    if (grid_.dim() != 2) return;
    const std::size_t n = grid_.size();
    const bool neumann = grid_.bc() == BoundaryKind::Neumann;
    sparse_ = std::make_unique<Sparse>();
    sparse_->weight.resize(static_cast<Eigen::Index>(n));
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(5 * n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = grid_.weight(k);
        sparse_->weight[static_cast<Eigen::Index>(k)] = w;
        double diag = 1.0;
        for (int a = 0; a < 2; ++a) {
            const double h2 = grid_.spacing(a) * grid_.spacing(a);
            const std::size_t i = grid_.axis_index(k, a);
            const std::size_t s = grid_.stride(a);
            const std::size_t cnt = grid_.count(a);
            diag += 2.0 * c / h2;
            auto add = [&](std::size_t col, double coef) {
                trip.emplace_back(static_cast<int>(k), static_cast<int>(col), -w * c * coef / h2);
            };
            if (i > 0 && i + 1 < cnt) {
                add(k - s, 1.0);
                add(k + s, 1.0);
            } else if (i == 0) {
                add(k + s, neumann ? 2.0 : 1.0);
            } else {
                add(k - s, neumann ? 2.0 : 1.0);
            }
        }
        trip.emplace_back(static_cast<int>(k), static_cast<int>(k), w * diag);
    }
    sparse_->base.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    sparse_->base.setFromTriplets(trip.begin(), trip.end());
    sparse_->base.makeCompressed();
}

ImplicitOperator::~ImplicitOperator() = default;
ImplicitOperator::ImplicitOperator(ImplicitOperator&&) noexcept = default;
ImplicitOperator& ImplicitOperator::operator=(ImplicitOperator&&) noexcept = default;

Field ImplicitOperator::apply(std::span<const double> shift, const Field& y) const {
    const Field lap = apply_laplacian(grid_, y);
    Field out(y.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        out[k] = (1.0 + (shift.empty() ? 0.0 : shift[k])) * y[k] - c_ * lap[k];
    }
    return out;
}

Field ImplicitOperator::solve(std::span<const double> shift, const Field& rhs) const {
    require_matches(grid_, rhs, "ImplicitOperator::solve");
    const std::size_t n = grid_.size();
    if (grid_.dim() == 1) {
        const double h2 = grid_.spacing(0) * grid_.spacing(0);
        const double off = -c_ / h2;
        const bool neumann = grid_.bc() == BoundaryKind::Neumann;
        std::vector<double> lower(n, off), diag(n), upper(n, off);
        for (std::size_t k = 0; k < n; ++k) diag[k] = 1.0 + 2.0 * c_ / h2 + (shift.empty() ? 0.0 : shift[k]);
        if (neumann) {
            upper[0] = 2.0 * off;
            lower[n - 1] = 2.0 * off;
        }
        // Thomas elimination.
        std::vector<double> cp(n), dp(n);
        cp[0] = upper[0] / diag[0];
        dp[0] = rhs[0] / diag[0];
        for (std::size_t k = 1; k < n; ++k) {
            const double m = diag[k] - lower[k] * cp[k - 1];
            if (m == 0.0 || !std::isfinite(m)) throw NumericalFailure("tridiagonal solve: zero pivot");
            cp[k] = k + 1 < n ? upper[k] / m : 0.0;
            dp[k] = (rhs[k] - lower[k] * dp[k - 1]) / m;
        }
        Field y(n);
        y[n - 1] = dp[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) y[k] = dp[k] - cp[k] * y[k + 1];
        return y;
    }

    Eigen::SparseMatrix<double> a = sparse_->base;
    Eigen::VectorXd b(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        if (!shift.empty() && shift[k] != 0.0) a.coeffRef(i, i) += sparse_->weight[i] * shift[k];
        b[i] = sparse_->weight[i] * rhs[k];
    }
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(cg_tol_);
    cg.setMaxIterations(static_cast<Eigen::Index>(std::max<std::size_t>(1000, 4 * n)));
    cg.compute(a);
    const Eigen::VectorXd x = cg.solve(b);
    if (cg.info() != Eigen::Success) {
        throw NumericalFailure("conjugate gradients did not converge (error " + std::to_string(cg.error()) + ")");
    }
    Field y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = x[static_cast<Eigen::Index>(k)];
    return y;
}

NewtonResult solve_penalized(const ImplicitOperator& op, std::span<const double> fixed,
                             std::span<const double> penalty, double eps, const Field& rhs,
                             const Field& guess, double tol, int max_iter) {
    const std::size_t n = rhs.size();
    std::vector<char> active(n), next(n);
    for (std::size_t k = 0; k < n; ++k) active[k] = penalty[k] > 0.0 && guess[k] < 0.0;
    std::vector<double> shift(n);
    NewtonResult res;
    bool converged = false;
    while (res.iterations < max_iter) {
        for (std::size_t k = 0; k < n; ++k) {
            shift[k] = (fixed.empty() ? 0.0 : fixed[k]) + (active[k] ? penalty[k] / eps : 0.0);
        }
        res.y = op.solve(shift, rhs);
        ++res.iterations;
        for (std::size_t k = 0; k < n; ++k) next[k] = penalty[k] > 0.0 && res.y[k] < 0.0;
        if (next == active) {
            converged = true;
            break;
        }
        active.swap(next);
    }
    if (!converged) {
        throw NumericalFailure("semismooth Newton: active set did not settle within " +
                               std::to_string(max_iter) + " iterations");
    }
    Field r = op.apply(fixed, res.y);
    double rhs_max = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        r[k] += penalty[k] * beta_eps(res.y[k], eps) - rhs[k];
        res.residual = std::max(res.residual, std::abs(r[k]));
        rhs_max = std::max(rhs_max, std::abs(rhs[k]));
    }
    if (!(res.residual <= tol * (1.0 + rhs_max))) {
        throw NumericalFailure("semismooth Newton: residual " + std::to_string(res.residual) +
                               " above tolerance");
    }
    for (double v : res.y) {
        if (!std::isfinite(v)) throw NumericalFailure("semismooth Newton: non-finite iterate");
    }
    return res;
}

}  // namespace svi
