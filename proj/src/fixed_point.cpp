#include "gvolt/detail/fixed_point.hpp"

#include <algorithm>
#include <cmath>

namespace gvolt::detail {

double jacobi_sweep(const GroundedGraph& g, double rho, std::span<const std::uint32_t> free_nodes,
                    std::span<const double> v, std::span<double> next) {
    double change = 0.0;
    for (auto i : free_nodes) {
        auto nb = g.neighbors(i);
        auto w = g.weights(i);
        double s = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) s += w[k] * v[nb[k]];
        // division rather than a cached reciprocal keeps next_i <= 1 exactly
        const double value = s / (rho + g.degree(i));
        change = std::max(change, std::abs(value - v[i]));
        next[i] = value;
    }
    return change;
}

SweepStats iterate_to_fixed_point(const GroundedGraph& g, double rho,
                                  std::span<const std::uint32_t> free_nodes, std::vector<double>& v,
                                  double tol, std::size_t max_iters) {
    SweepStats stats;
    if (free_nodes.empty()) {
        stats.converged = true;
        return stats;
    }
    std::vector<double> next = v;
    double prev_change = -1.0;
    while (stats.iterations < max_iters) {
        const double change = jacobi_sweep(g, rho, free_nodes, v, next);
        ++stats.iterations;
        for (auto i : free_nodes) v[i] = next[i];
        if (prev_change > 0.0) stats.max_ratio = std::max(stats.max_ratio, change / prev_change);
        prev_change = change;
        stats.final_residual = change;
        if (change <= tol) {
            stats.converged = true;
            break;
        }
    }
    return stats;
}

}  // namespace gvolt::detail
