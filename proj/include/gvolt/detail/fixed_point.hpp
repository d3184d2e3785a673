#pragma once

#include "gvolt/graph.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gvolt::detail {

struct SweepStats {
    std::size_t iterations = 0;
    double final_residual = 0.0;
    double max_ratio = 0.0;
    bool converged = false;
};

/// One Jacobi sweep over `free_nodes`:
///   next_i = (sum_j W_ij v_j) / (rho + degree_i).
/// Entries of `v` outside `free_nodes` act as fixed boundary values.
/// Returns the l-infinity change.
double jacobi_sweep(const GroundedGraph& g, double rho, std::span<const std::uint32_t> free_nodes,
                    std::span<const double> v, std::span<double> next);

/// Repeats sweeps until the change is <= tol or max_iters sweeps ran.
/// `v` holds the starting iterate and receives the result.
SweepStats iterate_to_fixed_point(const GroundedGraph& g, double rho,
                                  std::span<const std::uint32_t> free_nodes, std::vector<double>& v,
                                  double tol, std::size_t max_iters);

}  // namespace gvolt::detail
