#include "gvolt/solver.hpp"

#include "gvolt/detail/fixed_point.hpp"
#include "gvolt/errors.hpp"
#include "gvolt/neighbors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace gvolt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<std::uint8_t> source_flags(const GroundedGraph& g, const SourceRegion& source) {
    if (source.mask.empty()) throw EmptySourceError();
    std::vector<std::uint8_t> flag(g.size(), 0);
    for (auto i : source.mask) {
        if (i >= g.size()) throw ValidationError("source: node index out of range");
        flag[i] = 1;
    }
    return flag;
}

std::vector<std::uint32_t> free_nodes_of(const std::vector<std::uint8_t>& is_source) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < is_source.size(); ++i)
        if (!is_source[i]) out.push_back(static_cast<std::uint32_t>(i));
    return out;
}

double contraction_bound(const GroundedGraph& g, std::span<const std::uint32_t> free_nodes) {
    double q = 0.0;
    for (auto i : free_nodes) {
        const double d = g.degree(i);
        if (d > 0.0) q = std::max(q, d / (g.rho() + d));
    }
    return q;
}

/// rho = 0 is admissible only when every component touches the source, and
/// then the minimizer is the constant 1. Returns true when that shortcut
/// applies; throws IllPosedError when it does not.
bool ungrounded_constant(const GroundedGraph& g, const std::vector<std::uint8_t>& is_source) {
    if (g.rho() > 0.0) return false;
    const auto labels = g.component_labels();
    const auto n_comp = labels.empty() ? 0u : *std::ranges::max_element(labels) + 1;
    std::vector<std::uint8_t> touched(n_comp, 0);
    for (std::size_t i = 0; i < g.size(); ++i)
        if (is_source[i]) touched[labels[i]] = 1;
    for (std::size_t c = 0; c < n_comp; ++c) {
        if (!touched[c])
            throw IllPosedError(
                "ill-posed: no ground and no source path (rho = 0 and a connected component "
                "contains no source node)");
    }
    return true;
}

VoltageFunction make_voltage(const GroundedGraph& g, const SourceRegion& source) {
    VoltageFunction v;
    v.values.assign(g.size(), 0.0);
    for (auto i : source.mask) v.values[i] = 1.0;
    v.source = source;
    return v;
}

}  // namespace

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw ValidationError("solver.tol: must be > 0");
    if (max_iters < 1) throw ValidationError("solver.max_iters: must be >= 1");
    if (mode == Mode::localized && !(tau > 0.0 && tau < 1.0))
        throw ValidationError("solver.tau: must lie in (0, 1)");
}

std::string to_string(SolverConfig::Mode mode) {
    switch (mode) {
        case SolverConfig::Mode::full_power: return "full_power";
        case SolverConfig::Mode::localized: return "localized";
        case SolverConfig::Mode::direct_oracle: return "direct_oracle";
    }
    return "unknown";
}

SolverConfig::Mode solver_mode_from_string(const std::string& name) {
    if (name == "full_power" || name == "power") return SolverConfig::Mode::full_power;
    if (name == "localized") return SolverConfig::Mode::localized;
    if (name == "direct_oracle" || name == "direct") return SolverConfig::Mode::direct_oracle;
    throw ValidationError("solver.mode: unknown mode '" + name + "'");
}

std::pair<VoltageFunction, SolveReport> solve_grounded_emv(const GroundedGraph& graph,
                                                           const SourceRegion& source,
                                                           const SolverConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const auto is_source = source_flags(graph, source);
    auto result = std::make_pair(make_voltage(graph, source), SolveReport{});
    auto& [v, report] = result;

    if (ungrounded_constant(graph, is_source)) {
        std::ranges::fill(v.values, 1.0);
        report.contraction_bound = 1.0;
        report.warnings.emplace_back("rho = 0: every component touches the source, returning constant 1");
        report.wall_time = seconds_since(t0);
        return result;
    }

    const auto free_nodes = free_nodes_of(is_source);
    report.contraction_bound = contraction_bound(graph, free_nodes);

    // v0 = b: one sweep from the source indicator gives the source-neighbor term
    std::vector<double> start = v.values;
    detail::jacobi_sweep(graph, graph.rho(), free_nodes, v.values, start);
    v.values = std::move(start);

    const auto stats =
        detail::iterate_to_fixed_point(graph, graph.rho(), free_nodes, v.values, cfg.tol, cfg.max_iters);
    report.iterations = stats.iterations;
    report.final_residual = stats.final_residual;
    report.contraction_ratio_observed = stats.max_ratio;
    report.converged = stats.converged;
    if (!stats.converged)
        report.warnings.push_back("max_iters reached before the tolerance was met");
    report.wall_time = seconds_since(t0);
    return result;
}

VoltageFunction solve_direct_oracle(const GroundedGraph& graph, const SourceRegion& source) {
    const std::size_t n = graph.size();
    if (n > kDirectOracleMaxNodes)
        throw NumericalError("direct oracle is capped at " + std::to_string(kDirectOracleMaxNodes) +
                             " nodes (got " + std::to_string(n) + "); use the iterative solver");
    const auto is_source = source_flags(graph, source);
    auto v = make_voltage(graph, source);
    if (ungrounded_constant(graph, is_source)) {
        std::ranges::fill(v.values, 1.0);
        return v;
    }

    const auto free_nodes = free_nodes_of(is_source);
    if (free_nodes.empty()) return v;
    std::vector<Eigen::Index> slot(n, -1);
    for (std::size_t k = 0; k < free_nodes.size(); ++k) slot[free_nodes[k]] = static_cast<Eigen::Index>(k);

    const auto m = static_cast<Eigen::Index>(free_nodes.size());
    std::vector<Eigen::Triplet<double>> trips;
    Vector rhs = Vector::Zero(m);
    for (Eigen::Index row = 0; row < m; ++row) {
        const auto i = free_nodes[static_cast<std::size_t>(row)];
        trips.emplace_back(row, row, graph.rho() + graph.degree(i));
        auto nb = graph.neighbors(i);
        auto w = graph.weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (is_source[nb[k]])
                rhs(row) += w[k];
            else
                trips.emplace_back(row, slot[nb[k]], -w[k]);
        }
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success) throw NumericalError("direct oracle: factorization failed");
    const Vector x = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success) throw NumericalError("direct oracle: solve failed");
    // the exact solution lies in [0, 1]; clamp round-off at the boundary
    for (Eigen::Index row = 0; row < m; ++row)
        v.values[free_nodes[static_cast<std::size_t>(row)]] = std::clamp(x(row), 0.0, 1.0);
    return v;
}

std::pair<VoltageFunction, SolveReport> solve_localized(const GroundedGraph& graph,
                                                        const SourceRegion& source,
                                                        const SolverConfig& cfg) {
    SolverConfig local = cfg;
    local.mode = SolverConfig::Mode::localized;
    local.validate();
    const auto t0 = Clock::now();
    const auto is_source = source_flags(graph, source);
    auto result = std::make_pair(make_voltage(graph, source), SolveReport{});
    auto& [v, report] = result;

    if (ungrounded_constant(graph, is_source)) {
        // no decay without ground: the support is everything
        std::ranges::fill(v.values, 1.0);
        std::vector<std::size_t> all(graph.size());
        for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
        v.support = std::move(all);
        report.contraction_bound = 1.0;
        report.warnings.emplace_back("rho = 0: every component touches the source, returning constant 1");
        report.wall_time = seconds_since(t0);
        return result;
    }

    const std::size_t n = graph.size();
    std::vector<std::uint8_t> active(is_source.begin(), is_source.end());
    std::vector<std::uint8_t> expanded(n, 0);
    std::vector<std::uint32_t> active_free;
    std::vector<std::uint32_t> members(source.mask.begin(), source.mask.end());

    bool solved_once = false;
    for (;;) {
        std::size_t added = 0;
        const std::size_t count = members.size();
        for (std::size_t k = 0; k < count; ++k) {
            const auto u = members[k];
            if (expanded[u] || v.values[u] < local.tau) continue;
            expanded[u] = 1;
            for (auto w : graph.neighbors(u)) {
                if (active[w]) continue;
                active[w] = 1;
                active_free.push_back(w);
                members.push_back(w);
                ++added;
            }
        }
        if (added == 0 && solved_once) break;
        std::ranges::sort(active_free);
        report.contraction_bound = std::max(report.contraction_bound, contraction_bound(graph, active_free));
        const std::size_t budget = local.max_iters - std::min(local.max_iters, report.iterations);
        const auto stats =
            detail::iterate_to_fixed_point(graph, graph.rho(), active_free, v.values, local.tol, budget);
        report.iterations += stats.iterations;
        report.final_residual = stats.final_residual;
        report.contraction_ratio_observed = std::max(report.contraction_ratio_observed, stats.max_ratio);
        solved_once = true;
        if (!stats.converged) {
            report.converged = false;
            report.warnings.push_back("max_iters reached before the tolerance was met");
            break;
        }
    }

    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i)
        if (active[i] && v.values[i] >= local.tau) support.push_back(i);
    v.support = std::move(support);
    report.wall_time = seconds_since(t0);
    return result;
}

std::pair<VoltageFunction, SolveReport> solve(const GroundedGraph& graph, const SourceRegion& source,
                                              const SolverConfig& cfg) {
    switch (cfg.mode) {
        case SolverConfig::Mode::full_power: return solve_grounded_emv(graph, source, cfg);
        case SolverConfig::Mode::localized: return solve_localized(graph, source, cfg);
        case SolverConfig::Mode::direct_oracle: {
            const auto t0 = Clock::now();
            SolveReport report;
            auto v = solve_direct_oracle(graph, source);
            report.final_residual = fixed_point_residual(graph, source, v.values);
            report.wall_time = seconds_since(t0);
            return {std::move(v), report};
        }
    }
    throw ValidationError("solver.mode: unknown");
}

double fixed_point_residual(const GroundedGraph& graph, const SourceRegion& source,
                            std::span<const double> values) {
    const auto is_source = source_flags(graph, source);
    double worst = 0.0;
    for (std::size_t i = 0; i < graph.size(); ++i) {
        if (is_source[i]) continue;
        const double denom = graph.rho() + graph.degree(i);
        if (denom == 0.0) continue;
        auto nb = graph.neighbors(i);
        auto w = graph.weights(i);
        double s = 0.0;
        for (std::size_t k = 0; k < nb.size(); ++k) s += w[k] * (is_source[nb[k]] ? 1.0 : values[nb[k]]);
        worst = std::max(worst, std::abs(values[i] - s / denom));
    }
    return worst;
}

std::vector<std::optional<double>> kernel_average(const PointCloud& cloud, const KernelSpec& kernel,
                                                  std::span<const double> values, const RowMatrix& queries) {
    if (values.size() != cloud.size()) throw ValidationError("extension: value count differs from sample size");
    if (queries.cols() != cloud.points.cols())
        throw ValidationError("extension: query dimension " + std::to_string(queries.cols()) +
                              " does not match the point cloud (" + std::to_string(cloud.dim()) + ")");
    const auto q_count = static_cast<std::size_t>(queries.rows());
    const auto d = static_cast<std::size_t>(queries.cols());
    std::vector<std::optional<double>> out(q_count);

    auto query_row = [&](std::size_t k) { return std::span<const double>(queries.data() + k * d, d); };

    if (kernel.kind == KernelSpec::Kind::radial) {
        GridIndex grid(cloud.points, kernel.bandwidth);
        for (std::size_t k = 0; k < q_count; ++k) {
            double num = 0.0, den = 0.0;
            grid.for_each_within(query_row(k), kernel.bandwidth, [&](std::uint32_t j, double dist) {
                if (dist == 0.0) return;
                num += values[j];
                den += 1.0;
            });
            if (den > 0.0) out[k] = num / den;
        }
    } else {
        for (std::size_t k = 0; k < q_count; ++k) {
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < cloud.size(); ++j) {
                const double dist = euclidean_distance(query_row(k), cloud.row(j));
                if (dist == 0.0) continue;
                const double w = kernel.at_distance(dist);
                num += w * values[j];
                den += w;
            }
            if (den > 0.0) out[k] = num / den;
        }
    }
    return out;
}

std::vector<std::optional<double>> extend_voltage(const GroundedGraph& graph, const VoltageFunction& v,
                                                  const RowMatrix& queries) {
    const auto& cloud = graph.cloud();
    if (!cloud || !graph.kernel())
        throw ValidationError("extension: graph carries no point cloud or kernel (imported graph?)");
    auto out = kernel_average(*cloud, *graph.kernel(), v.values, queries);
    if (v.source.has_geometry()) {
        const auto d = static_cast<std::size_t>(queries.cols());
        std::span<const double> center(v.source.center.data(), d);
        for (std::size_t k = 0; k < out.size(); ++k) {
            std::span<const double> q(queries.data() + k * d, d);
            if (euclidean_distance(q, center) <= v.source.radius) out[k] = 1.0;
        }
    }
    // round-off can push a weighted mean a hair outside [0, 1]
    for (auto& value : out)
        if (value) *value = std::clamp(*value, 0.0, 1.0);
    return out;
}

}  // namespace gvolt
