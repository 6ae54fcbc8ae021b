#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "svi/grid.hpp"

namespace svi {

/// Uniform time grid t_n = n T / N, n = 0..N.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps);
    /// Step count round(T/dt), at least 1.
    static TimeGrid from_step(double horizon, double dt);

    double horizon() const { return horizon_; }
    std::size_t steps() const { return steps_; }
    double dt() const { return horizon_ / static_cast<double>(steps_); }
    double time(std::size_t n) const {
        return n == steps_ ? horizon_ : static_cast<double>(n) * dt();
    }
    TimeGrid halved() const { return TimeGrid(horizon_, 2 * steps_); }

private:
    double horizon_;
    std::size_t steps_;
};

/**
 * m independent Brownian motions sampled on a TimeGrid.
 *
 * Motion k of path path_id draws its increments from the counter stream keyed by
 * (seed, path_id, k), so paths can be generated in any order or in parallel.
 */
class BrownianPathSet {
public:
    BrownianPathSet(TimeGrid tg, std::size_t m, std::uint64_t seed, std::uint64_t path_id,
                    std::vector<std::vector<double>> increments);

    std::size_t m() const { return increments_.size(); }
    const TimeGrid& time_grid() const { return tg_; }
    std::uint64_t seed() const { return seed_; }
    std::uint64_t path_id() const { return path_id_; }
    /// Number of dyadic bridge refinements applied since sampling.
    int refinement() const { return refinement_; }

    std::span<const double> increments(std::size_t k) const { return increments_[k]; }
    std::span<const double> values(std::size_t k) const { return values_[k]; }
    double increment(std::size_t k, std::size_t n) const { return increments_[k][n]; }
    double value(std::size_t k, std::size_t n) const { return values_[k][n]; }

    friend BrownianPathSet refine_paths(const BrownianPathSet& paths);

private:
    TimeGrid tg_;
    std::uint64_t seed_;
    std::uint64_t path_id_;
    int refinement_ = 0;
    std::vector<std::vector<double>> increments_;
    std::vector<std::vector<double>> values_;
};

BrownianPathSet sample_paths(const TimeGrid& tg, std::size_t m, std::uint64_t seed, std::uint64_t path_id);

/// Same realisation on the grid with dt halved: midpoints filled by Brownian bridge
/// draws from a substream keyed by the refinement level.
BrownianPathSet refine_paths(const BrownianPathSet& paths);

/// sup over k and t_n of |beta_k(t_n)|.
double path_sup(const BrownianPathSet& paths);

enum class TimeKind { Constant, Linear, Cosine };
enum class SpaceKind { Constant, Polynomial, Sine, Cosine };

/// a(t): 1, c0 + c1 t, or cos(c0 t + c1).
struct TimeFactor {
    TimeKind kind = TimeKind::Constant;
    double c0 = 0.0;
    double c1 = 0.0;

    double value(double t) const;
    double derivative(double t) const;
};

/// b(xi) = prod over axes of phi(xi_d), phi one of 1, c0 + c1 s + c2 s^2,
/// sin(mode pi s / L_d), cos(mode pi s / L_d).
struct SpaceFactor {
    SpaceKind kind = SpaceKind::Constant;
    std::array<double, 3> poly{0.0, 0.0, 0.0};
    int mode = 1;

    struct Sample {
        double value;
        std::array<double, 2> grad;
        double lap;
    };
    Sample eval(const Grid& grid, std::size_t node) const;
    Sample eval(int dim, std::array<double, 2> lengths, std::array<double, 2> xi) const;
};

/// mu_k(t, xi) = amplitude * a(t) * b(xi).
struct CoeffTerm {
    double amplitude = 1.0;
    TimeFactor time;
    SpaceFactor space;
};

struct CoeffSpec {
    std::vector<CoeffTerm> terms;
    std::size_t m() const { return terms.size(); }
};

/// mu_k(t, .) on the grid.
Field eval_mu_k(const CoeffSpec& cs, std::size_t k, double t, const Grid& grid);

/// mu(t_n) = sum_k mu_k(t_n) beta_k(t_n).
Field eval_mu(const CoeffSpec& cs, const BrownianPathSet& paths, std::size_t n, const Grid& grid);

/// sum_k (d_t mu_k(t_n) beta_k(t_n) + mu_k(t_n)^2 / 2).
Field eval_mu_tilde(const CoeffSpec& cs, const BrownianPathSet& paths, std::size_t n, const Grid& grid);

struct MuDerivatives {
    VectorField grad_mu;
    Field lap_mu;
    /// Transport field g = -2 grad mu.
    VectorField g;
};

/// Analytic spatial derivatives of mu(t_n).
MuDerivatives eval_mu_derivs(const CoeffSpec& cs, const BrownianPathSet& paths, std::size_t n,
                             const Grid& grid);

}  // namespace svi
