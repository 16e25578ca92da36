#include "ezmfg/grid.hpp"

#include <string>

namespace ezmfg {

Grid build_grid(double x_low, double x_max, int n, Clustering clustering) {
    if (!(x_max > x_low)) {
        throw BadGrid("x_max must exceed x_low");
    }
    if (n < 100) {
        throw BadGrid("need at least 100 cells, got " + std::to_string(n));
    }
    Grid g;
    g.clustering = clustering;
    g.x.resize(n + 1);
    double span = x_max - x_low;
    if (clustering == Clustering::none) {
        for (int k = 0; k <= n; ++k) {
            g.x[k] = x_low + span * static_cast<double>(k) / n;
        }
    } else {
        int k0 = n / 10;
        for (int k = 0; k <= k0; ++k) {
            double t = static_cast<double>(k) / n;
            g.x[k] = x_low + span * t * t;
        }
        double left = g.x[k0];
        for (int k = k0 + 1; k <= n; ++k) {
            g.x[k] = left + (x_max - left) * static_cast<double>(k - k0) / (n - k0);
        }
    }
    g.x[n] = x_max;
    g.dx.resize(n);
    for (int k = 0; k < n; ++k) {
        g.dx[k] = g.x[k + 1] - g.x[k];
        if (!(g.dx[k] > 0.0)) {
            throw BadGrid("nodes not strictly increasing at index " + std::to_string(k));
        }
    }
    return g;
}

}  // namespace ezmfg
