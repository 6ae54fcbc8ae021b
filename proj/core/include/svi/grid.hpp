#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace svi {

enum class BoundaryKind { Dirichlet, Neumann };

/// Nodal values of a scalar function on a Grid at one time instant.
class Field {
public:
    Field() = default;
    explicit Field(std::size_t n, double value = 0.0) : values_(n, value) {}
    explicit Field(std::vector<double> values) : values_(std::move(values)) {}

    std::size_t size() const { return values_.size(); }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    std::span<double> span() { return values_; }
    std::span<const double> span() const { return values_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    auto begin() { return values_.begin(); }
    auto end() { return values_.end(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    bool operator==(const Field&) const = default;

private:
    std::vector<double> values_;
};

/// One Field per spatial axis.
struct VectorField {
    std::vector<Field> components;

    std::size_t dim() const { return components.size(); }
    const Field& operator[](std::size_t axis) const { return components[axis]; }
    Field& operator[](std::size_t axis) { return components[axis]; }
};

/**
 * Uniform tensor grid on an interval or rectangle.
 *
 * Dirichlet grids hold interior nodes only: the boundary carries ghost value 0
 * and h = L/(n+1). Neumann grids include the boundary nodes: h = L/(n-1).
 * Nodes are numbered with axis 0 fastest.
 */
class Grid {
public:
    int dim() const { return dim_; }
    BoundaryKind bc() const { return bc_; }
    std::size_t size() const { return size_; }

    double length(int axis) const { return lengths_[axis]; }
    std::size_t count(int axis) const { return counts_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    double min_spacing() const;

    std::size_t stride(int axis) const { return axis == 0 ? 1 : counts_[0]; }
    std::size_t axis_index(std::size_t node, int axis) const {
        return axis == 0 ? node % counts_[0] : node / counts_[0];
    }
    std::size_t node(std::size_t i, std::size_t j = 0) const { return i + counts_[0] * j; }

    /// Position of node along axis.
    double coord(std::size_t node, int axis) const;
    std::array<double, 2> point(std::size_t node) const;

    /// Node lies on the boundary (Neumann grids only; Dirichlet grids exclude it).
    bool on_boundary(std::size_t node) const { return boundary_mask_[node] != 0; }
    /// Node has a neighbour outside the node set (Dirichlet) or lies on the boundary (Neumann).
    bool touches_boundary(std::size_t node) const;
    const std::vector<char>& boundary_mask() const { return boundary_mask_; }
    std::vector<std::size_t> boundary_nodes() const;

    /// Quadrature weight: cell volume, halved per axis at Neumann boundary nodes.
    double weight(std::size_t node) const;
    /// Length (2D) or count (1D) of boundary attributed to the node; 0 off the boundary.
    double boundary_weight(std::size_t node) const;

    Field zeros() const { return Field(size_); }
    Field sample(const std::function<double(double, double)>& fn) const;

    friend Grid build_grid(int dim, std::span<const double> lengths, std::size_t n, BoundaryKind bc);

private:
    Grid() = default;

    int dim_ = 1;
    BoundaryKind bc_ = BoundaryKind::Dirichlet;
    std::array<double, 2> lengths_{1.0, 1.0};
    std::array<std::size_t, 2> counts_{1, 1};
    std::array<double, 2> spacing_{1.0, 1.0};
    std::size_t size_ = 0;
    std::vector<char> boundary_mask_;
};

/// Throws ConfigError unless dim is 1 or 2, every length is positive and n >= 3.
Grid build_grid(int dim, std::span<const double> lengths, std::size_t n, BoundaryKind bc);
inline Grid build_grid(int dim, std::initializer_list<double> lengths, std::size_t n, BoundaryKind bc) {
    return build_grid(dim, std::span<const double>(lengths.begin(), lengths.size()), n, bc);
}

/// Centered 5-point (3-point in 1D) Laplacian; Dirichlet ghost 0, Neumann ghost by reflection.
Field apply_laplacian(const Grid& grid, const Field& u);

/// Centered differences; Dirichlet uses the zero ghost, Neumann boundary nodes use
/// second-order one-sided differences.
VectorField apply_gradient(const Grid& grid, const Field& u);

double inner(const Grid& grid, const Field& u, const Field& v);
double norm_l2(const Grid& grid, const Field& u);
double norm_max(const Field& u);

/// Edge-difference Dirichlet form sum_edges (Du)(Dv): equals inner(-Laplacian(u), v) on both
/// boundary kinds.
double dirichlet_form(const Grid& grid, const Field& u, const Field& v);
double seminorm_h1(const Grid& grid, const Field& u);

/// L2 norm of the trace; zero on Dirichlet grids.
double boundary_norm_l2(const Grid& grid, const Field& u);
double boundary_inner(const Grid& grid, const Field& u, const Field& v);

/// Throws SizeMismatch if u does not live on grid.
void require_matches(const Grid& grid, const Field& u, const char* what);

}  // namespace svi
