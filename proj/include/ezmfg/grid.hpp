#pragma once

#include <vector>

#include "ezmfg/errors.hpp"

namespace ezmfg {

enum class Clustering { none, sqrt_boundary };

struct Grid {
    std::vector<double> x;   // nodes, x[0] = x_low, strictly increasing
    std::vector<double> dx;  // cell widths, dx[i] = x[i+1] - x[i]
    Clustering clustering = Clustering::none;

    int n_nodes() const { return static_cast<int>(x.size()); }
    int n_cells() const { return n_nodes() - 1; }
    double x_low() const { return x.front(); }
    double x_max() const { return x.back(); }
};

// n is the cell count, so the grid has n+1 nodes. sqrt_boundary places node k
// at x_low + (x_max - x_low)*(k/n)^2 for the first 10% of nodes, resolving the
// square-root saving layer at the borrowing limit, and is uniform afterwards.
Grid build_grid(double x_low, double x_max, int n, Clustering clustering);

}  // namespace ezmfg
