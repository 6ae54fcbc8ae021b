#pragma once

#include <functional>
#include <vector>

#include "svi/pathsolver.hpp"

namespace svi {

/**
 * One-phase melting data: initial temperature theta0 >= 0, latent heat rho > 0, and an
 * optional fixed temperature on the left wall of a 1D interval.
 */
struct StefanData {
    Field theta0;
    double rho = 1.0;
    /// Nodes with theta0 > 0 (the initially liquid region).
    std::vector<char> o0_mask;
    /// Temperature held on the left end of a 1D Dirichlet interval; 0 means a cold wall.
    double wall_temperature = 0.0;
};

/// Validates theta0 >= 0, rho > 0, wall_temperature >= 0 and fills o0_mask.
StefanData make_stefan_data(const Grid& grid, Field theta0, double rho, double wall_temperature = 0.0);

/// f0 = theta0 on the liquid set, -rho elsewhere.
Field build_svi_source(const StefanData& sd, const Grid& grid);

/// Interface of the melted set {y > tol} at each time level.
struct FreeBoundary {
    std::vector<double> times;
    /// 1D: rightmost melted position of the tracked component, linearly interpolated to the
    /// threshold crossing. 2D: radius of the disc with the tracked melted area. 0 when nothing melted.
    std::vector<double> front;
    /// Quadrature measure of all melted nodes.
    std::vector<double> melted_measure;
    /// Connected melted components at each level (more than one is reported, not an error).
    std::vector<std::size_t> components;
    /// melted[n][k] != 0 when node k is melted at level n.
    std::vector<std::vector<char>> melted;
    /// First level at which each node is melted, -1 if never.
    std::vector<long> first_melted;
    double tol = 0.0;

    bool empty() const;
    /// Front nondecreasing and melted sets nested, up to tol_front in the front position.
    bool monotone(double tol_front = 0.0) const;
};

/// Free boundary of {y > tol}. seeds selects the tracked component(s); an empty or all-zero
/// seed mask tracks every melted node.
FreeBoundary extract_free_boundary(const Grid& grid, const Trajectory& y, double tol,
                                   const std::vector<char>& seeds = {});

struct StefanSolution {
    PathSolution sol;
    /// theta = e^mu (y_{n+1} - y_n) / dt; the first slice is theta0.
    Trajectory theta;
    FreeBoundary fb;
    /// Largest |eta - f0| over nodes that stayed solid (with their neighbours) across a step.
    double source_residual = 0.0;
};

/**
 * Solves the obstacle problem with source f0 and zero initial datum in the transformed
 * variables (reaction from the noise only), recovers the temperature by backward
 * differencing and extracts the free boundary. tol_fb <= 0 selects 10 eps.
 */
StefanSolution solve_stefan_svi(const Grid& grid, const TimeGrid& tg, const CoeffSpec& cs, const StefanData& sd,
                                const SolveConfig& cfg, const BrownianPathSet& paths, double tol_fb = 0.0);

struct SimilaritySolution {
    double lambda = 0.0;
    double front = 0.0;
    /// |lambda e^{lambda^2} erf(lambda) - St / sqrt(pi)|.
    double residual = 0.0;
    double time = 0.0;
    /// Temperature at xi for a unit wall temperature.
    std::function<double(double)> profile;
};

/// Classical one-phase melting front 2 lambda sqrt(t) with lambda found by bisection.
/// Throws ConfigError when St or t is not positive or the root cannot be bracketed.
SimilaritySolution similarity_oracle(double stefan_number, double t);

/**
 * y(t, xi) = integral of e^-mu theta from the melting time of xi (or from 0 on the liquid
 * set) to t, with the backward rectangle rule that matches the differencing of theta.
 * mu may be empty for deterministic runs.
 */
Trajectory baiocchi_forward(const Trajectory& theta, const FreeBoundary& fb, const Grid& grid, const TimeGrid& tg,
                            const std::vector<char>& o0_mask = {}, const Trajectory& mu = {});

}  // namespace svi
