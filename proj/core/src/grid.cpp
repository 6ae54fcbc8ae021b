#include "svi/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "svi/errors.hpp"

namespace svi {

Grid build_grid(int dim, std::span<const double> lengths, std::size_t n, BoundaryKind bc) {
    if (dim != 1 && dim != 2) {
        throw ConfigError("grid: dim must be 1 or 2, got " + std::to_string(dim));
    }
    if (lengths.size() != static_cast<std::size_t>(dim)) {
        throw ConfigError("grid: expected " + std::to_string(dim) + " lengths, got " +
                          std::to_string(lengths.size()));
    }
    if (n < 3) {
        throw ConfigError("grid: n must be >= 3, got " + std::to_string(n));
    }
    Grid g;
    g.dim_ = dim;
    g.bc_ = bc;
    g.size_ = 1;
    for (int a = 0; a < dim; ++a) {
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
            throw ConfigError("grid: lengths must be positive and finite");
        }
        g.lengths_[a] = lengths[a];
        g.counts_[a] = n;
        g.spacing_[a] = bc == BoundaryKind::Dirichlet ? lengths[a] / static_cast<double>(n + 1)
                                                      : lengths[a] / static_cast<double>(n - 1);
        g.size_ *= n;
    }
    if (dim == 1) {
        g.counts_[1] = 1;
        g.lengths_[1] = 0.0;
        g.spacing_[1] = 1.0;
    }
    g.boundary_mask_.assign(g.size_, 0);
    if (bc == BoundaryKind::Neumann) {
        for (std::size_t k = 0; k < g.size_; ++k) {
            for (int a = 0; a < dim; ++a) {
                const std::size_t i = g.axis_index(k, a);
                if (i == 0 || i + 1 == g.counts_[a]) g.boundary_mask_[k] = 1;
            }
        }
    }
    return g;
}

double Grid::min_spacing() const {
    return dim_ == 1 ? spacing_[0] : std::min(spacing_[0], spacing_[1]);
}

double Grid::coord(std::size_t node, int axis) const {
    const auto i = static_cast<double>(axis_index(node, axis));
    return bc_ == BoundaryKind::Dirichlet ? (i + 1.0) * spacing_[axis] : i * spacing_[axis];
}

std::array<double, 2> Grid::point(std::size_t node) const {
    return {coord(node, 0), dim_ == 2 ? coord(node, 1) : 0.0};
}

bool Grid::touches_boundary(std::size_t node) const {
    for (int a = 0; a < dim_; ++a) {
        const std::size_t i = axis_index(node, a);
        if (i == 0 || i + 1 == counts_[a]) return true;
    }
    return false;
}

std::vector<std::size_t> Grid::boundary_nodes() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < size_; ++k) {
        if (boundary_mask_[k]) out.push_back(k);
    }
    return out;
}

double Grid::weight(std::size_t node) const {
    double w = 1.0;
    for (int a = 0; a < dim_; ++a) {
        double wa = spacing_[a];
        if (bc_ == BoundaryKind::Neumann) {
            const std::size_t i = axis_index(node, a);
            if (i == 0 || i + 1 == counts_[a]) wa *= 0.5;
        }
        w *= wa;
    }
    return w;
}

double Grid::boundary_weight(std::size_t node) const {
    if (!boundary_mask_[node]) return 0.0;
    if (dim_ == 1) return 1.0;
    // Each axis whose index sits on an end contributes the half-or-full tangential cell
    // length of the other axis.
    double w = 0.0;
    for (int a = 0; a < 2; ++a) {
        const std::size_t i = axis_index(node, a);
        if (i != 0 && i + 1 != counts_[a]) continue;
        const int t = 1 - a;
        const std::size_t it = axis_index(node, t);
        const bool end = it == 0 || it + 1 == counts_[t];
        w += end ? 0.5 * spacing_[t] : spacing_[t];
    }
    return w;
}

Field Grid::sample(const std::function<double(double, double)>& fn) const {
    Field f(size_);
    for (std::size_t k = 0; k < size_; ++k) {
        const auto p = point(k);
        f[k] = fn(p[0], p[1]);
    }
    return f;
}

void require_matches(const Grid& grid, const Field& u, const char* what) {
    if (u.size() != grid.size()) {
        throw SizeMismatch(std::string(what) + ": field has " + std::to_string(u.size()) +
                           " values, grid has " + std::to_string(grid.size()) + " nodes");
    }
}

namespace {

// Neighbour value along an axis, applying the boundary rule for off-grid nodes.
double neighbour(const Grid& grid, const Field& u, std::size_t k, int axis, int side) {
    const std::size_t i = grid.axis_index(k, axis);
    const std::size_t s = grid.stride(axis);
    const std::size_t n = grid.count(axis);
    if (side < 0) {
        if (i > 0) return u[k - s];
        return grid.bc() == BoundaryKind::Dirichlet ? 0.0 : u[k + s];
    }
    if (i + 1 < n) return u[k + s];
    return grid.bc() == BoundaryKind::Dirichlet ? 0.0 : u[k - s];
}

}  // namespace

Field apply_laplacian(const Grid& grid, const Field& u) {
    require_matches(grid, u, "apply_laplacian");
    Field out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double acc = 0.0;
        for (int a = 0; a < grid.dim(); ++a) {
            const double h = grid.spacing(a);
            acc += (neighbour(grid, u, k, a, -1) - 2.0 * u[k] + neighbour(grid, u, k, a, +1)) / (h * h);
        }
        out[k] = acc;
    }
    return out;
}

VectorField apply_gradient(const Grid& grid, const Field& u) {
    require_matches(grid, u, "apply_gradient");
    VectorField out;
    out.components.assign(static_cast<std::size_t>(grid.dim()), Field(grid.size()));
    for (int a = 0; a < grid.dim(); ++a) {
        const double h = grid.spacing(a);
        const std::size_t s = grid.stride(a);
        const std::size_t n = grid.count(a);
        Field& d = out.components[a];
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const std::size_t i = grid.axis_index(k, a);
            if (grid.bc() == BoundaryKind::Neumann && i == 0) {
                d[k] = (-3.0 * u[k] + 4.0 * u[k + s] - u[k + 2 * s]) / (2.0 * h);
            } else if (grid.bc() == BoundaryKind::Neumann && i + 1 == n) {
                d[k] = (3.0 * u[k] - 4.0 * u[k - s] + u[k - 2 * s]) / (2.0 * h);
            } else {
                d[k] = (neighbour(grid, u, k, a, +1) - neighbour(grid, u, k, a, -1)) / (2.0 * h);
            }
        }
    }
    return out;
}

double inner(const Grid& grid, const Field& u, const Field& v) {
    require_matches(grid, u, "inner");
    require_matches(grid, v, "inner");
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) acc += grid.weight(k) * u[k] * v[k];
    return acc;
}

double norm_l2(const Grid& grid, const Field& u) { return std::sqrt(std::max(0.0, inner(grid, u, u))); }

double norm_max(const Field& u) {
    double m = 0.0;
    for (double x : u) m = std::max(m, std::abs(x));
    return m;
}

double dirichlet_form(const Grid& grid, const Field& u, const Field& v) {
    require_matches(grid, u, "dirichlet_form");
    require_matches(grid, v, "dirichlet_form");
    const bool dirichlet = grid.bc() == BoundaryKind::Dirichlet;
    double acc = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
        const double h = grid.spacing(a);
        const std::size_t s = grid.stride(a);
        const std::size_t n = grid.count(a);
        // Tangential quadrature weight of the edge, taken from the other axis.
        auto tangential = [&](std::size_t k) {
            if (grid.dim() == 1) return 1.0;
            const int t = 1 - a;
            double w = grid.spacing(t);
            const std::size_t it = grid.axis_index(k, t);
            if (!dirichlet && (it == 0 || it + 1 == grid.count(t))) w *= 0.5;
            return w;
        };
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const std::size_t i = grid.axis_index(k, a);
            const double wt = tangential(k) / h;
            if (i + 1 < n) {
                acc += wt * (u[k + s] - u[k]) * (v[k + s] - v[k]);
            } else if (dirichlet) {
                acc += wt * u[k] * v[k];
            }
            if (dirichlet && i == 0) acc += wt * u[k] * v[k];
        }
    }
    return acc;
}

double seminorm_h1(const Grid& grid, const Field& u) {
    return std::sqrt(std::max(0.0, dirichlet_form(grid, u, u)));
}

double boundary_inner(const Grid& grid, const Field& u, const Field& v) {
    require_matches(grid, u, "boundary_inner");
    require_matches(grid, v, "boundary_inner");
    double acc = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (grid.on_boundary(k)) acc += grid.boundary_weight(k) * u[k] * v[k];
    }
    return acc;
}

double boundary_norm_l2(const Grid& grid, const Field& u) {
    return std::sqrt(std::max(0.0, boundary_inner(grid, u, u)));
}

}  // namespace svi
