#pragma once

#include "gvolt/graph.hpp"
#include "gvolt/solver.hpp"

#include <string>
#include <utility>
#include <vector>

namespace gvolt {

/// Ungrounded source/sink baselines that exhibit the point-ER trivial limit.
enum class BaselineMethod { pm, region_er, density_er, point_er };

std::string to_string(BaselineMethod m);
BaselineMethod baseline_method_from_string(const std::string& name);

struct SourceSinkSpec {
    SourceRegion source;
    SourceRegion sink;
    BaselineMethod mode = BaselineMethod::pm;
    std::size_t source_node = 0;  // sample nearest the source center
    std::size_t sink_node = 0;    // sample nearest the sink center
};

/// Selects both balls and their representative nodes. Throws when either
/// ball is empty or the two masks intersect.
SourceSinkSpec make_source_sink(const PointCloud& cloud, std::span<const double> source_center,
                                double source_radius, std::span<const double> sink_center,
                                double sink_radius, BaselineMethod mode);

/// Power method with the source pinned to 1 and the sink pinned to 0; the
/// graph's ground weight is ignored. Components reaching only one of the two
/// sets are filled with that set's value, components reaching neither get 0,
/// and both cases add a warning.
std::pair<VoltageFunction, SolveReport> solve_pm(const GroundedGraph& graph, const SourceSinkSpec& spec,
                                                 const SolverConfig& cfg = {});

struct LaplacianSolveResult {
    std::vector<double> x;  // mean zero
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

struct CgConfig {
    double rel_tol = 1e-8;
    std::size_t max_iters = 0;  // 0 means 20 n
};

/// Conjugate gradients for L x = rhs on the mean-zero subspace (L is the
/// ungrounded graph Laplacian). rhs must sum to zero within 1e-9.
LaplacianSolveResult laplacian_solve(const GroundedGraph& graph, std::span<const double> rhs,
                                     const CgConfig& cfg = {});

/// External-current vector for the ER variants (not used by pm).
std::vector<double> er_rhs(std::size_t n, const SourceSinkSpec& spec);

/// L^+ rhs for region_er, density_er or point_er.
LaplacianSolveResult er_voltage(const GroundedGraph& graph, const SourceSinkSpec& spec,
                                const CgConfig& cfg = {});

/// (e_l - e_k)^T L^+ (e_l - e_k).
double effective_resistance(const GroundedGraph& graph, std::size_t l, std::size_t k,
                            const CgConfig& cfg = {});

}  // namespace gvolt
