#pragma once

#include "gvolt/graph.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gvolt {

struct SolverConfig {
    enum class Mode { full_power, localized, direct_oracle };

    double tol = 1e-10;  // l-infinity change between iterates
    std::size_t max_iters = 1'000'000;
    Mode mode = Mode::full_power;
    double tau = 0.01;  // support threshold, localized mode only

    void validate() const;
};

std::string to_string(SolverConfig::Mode mode);
SolverConfig::Mode solver_mode_from_string(const std::string& name);

/// Grounded voltage on the sample: 1 on the source, in [0, 1] elsewhere.
struct VoltageFunction {
    std::vector<double> values;
    SourceRegion source;
    std::optional<std::vector<std::size_t>> support;  // localized mode
};

struct SolveReport {
    std::size_t iterations = 0;
    double final_residual = 0.0;
    /// max over consecutive sweeps of change(t+1) / change(t)
    double contraction_ratio_observed = 0.0;
    /// max over free nodes of degree_i / (rho + degree_i)
    double contraction_bound = 0.0;
    double wall_time = 0.0;  // seconds
    bool converged = true;
    std::vector<std::string> warnings;
};

/// Power iteration v <- D~^{-1} W~^(s) v started from the source-neighbor
/// term, stopped when the l-infinity change drops to cfg.tol.
///
/// With rho = 0 the problem is only well posed when every connected
/// component contains a source node; the answer is then the constant 1.
/// Otherwise throws IllPosedError.
std::pair<VoltageFunction, SolveReport> solve_grounded_emv(const GroundedGraph& graph,
                                                           const SourceRegion& source,
                                                           const SolverConfig& cfg = {});

/// Sparse Cholesky solve of the same fixed point; n <= 5000.
VoltageFunction solve_direct_oracle(const GroundedGraph& graph, const SourceRegion& source);

inline constexpr std::size_t kDirectOracleMaxNodes = 5000;

/// Frontier-truncated solve: only nodes reachable through nodes with value
/// >= tau are ever touched; everything else is held at 0.
std::pair<VoltageFunction, SolveReport> solve_localized(const GroundedGraph& graph,
                                                        const SourceRegion& source,
                                                        const SolverConfig& cfg);

/// Dispatches on cfg.mode.
std::pair<VoltageFunction, SolveReport> solve(const GroundedGraph& graph, const SourceRegion& source,
                                              const SolverConfig& cfg);

/// max over non-source i of |v_i - (sum_j W_ij v_j) / (rho + degree_i)|.
double fixed_point_residual(const GroundedGraph& graph, const SourceRegion& source,
                            std::span<const double> values);

/// Kernel-weighted average of node voltages at off-sample points; exactly 1
/// inside the source ball. Samples coinciding with the query are skipped, so
/// querying at a node gives the average over its graph neighbors. Entries
/// with no kernel mass are std::nullopt.
std::vector<std::optional<double>> extend_voltage(const GroundedGraph& graph, const VoltageFunction& v,
                                                  const RowMatrix& queries);

/// Kernel average of arbitrary node values (no source clause).
std::vector<std::optional<double>> kernel_average(const PointCloud& cloud, const KernelSpec& kernel,
                                                  std::span<const double> values, const RowMatrix& queries);

}  // namespace gvolt
