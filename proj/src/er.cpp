#include "gvolt/er.hpp"

#include "gvolt/detail/fixed_point.hpp"
#include "gvolt/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace gvolt {

namespace {

std::size_t nearest_node(const PointCloud& cloud, std::span<const double> center) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        const double d = euclidean_distance(cloud.row(i), center);
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

void laplacian_apply(const GroundedGraph& g, std::span<const double> x, std::span<double> out) {
    for (std::size_t i = 0; i < g.size(); ++i) {
        auto nb = g.neighbors(i);
        auto w = g.weights(i);
        double s = g.degree(i) * x[i];
        for (std::size_t k = 0; k < nb.size(); ++k) s -= w[k] * x[nb[k]];
        out[i] = s;
    }
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void recenter(std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
    for (auto& v : x) v -= mean;
}

}  // namespace

std::string to_string(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::pm: return "pm";
        case BaselineMethod::region_er: return "region-er";
        case BaselineMethod::density_er: return "density-er";
        case BaselineMethod::point_er: return "er";
    }
    return "unknown";
}

BaselineMethod baseline_method_from_string(const std::string& name) {
    if (name == "pm") return BaselineMethod::pm;
    if (name == "region-er" || name == "region_er") return BaselineMethod::region_er;
    if (name == "density-er" || name == "density_er") return BaselineMethod::density_er;
    if (name == "er" || name == "point-er" || name == "point_er") return BaselineMethod::point_er;
    throw ValidationError("baseline.method: unknown method '" + name + "'");
}

SourceSinkSpec make_source_sink(const PointCloud& cloud, std::span<const double> source_center,
                                double source_radius, std::span<const double> sink_center,
                                double sink_radius, BaselineMethod mode) {
    SourceSinkSpec spec;
    spec.mode = mode;
    spec.source = select_source(cloud, source_center, source_radius);
    try {
        spec.sink = select_source(cloud, sink_center, sink_radius);
    } catch (const EmptySourceError&) {
        throw ValidationError("empty sink: no sample lies inside the sink region");
    }
    std::vector<std::size_t> common;
    std::ranges::set_intersection(spec.source.mask, spec.sink.mask, std::back_inserter(common));
    if (!common.empty()) throw ValidationError("source and sink regions share nodes");
    spec.source_node = nearest_node(cloud, source_center);
    spec.sink_node = nearest_node(cloud, sink_center);
    return spec;
}

std::pair<VoltageFunction, SolveReport> solve_pm(const GroundedGraph& graph, const SourceSinkSpec& spec,
                                                 const SolverConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = graph.size();
    if (spec.source.mask.empty()) throw EmptySourceError();
    if (spec.sink.mask.empty()) throw ValidationError("empty sink");

    std::vector<std::uint8_t> role(n, 0);  // 0 free, 1 source, 2 sink
    for (auto i : spec.source.mask) role.at(i) = 1;
    for (auto i : spec.sink.mask) {
        if (role.at(i) == 1) throw ValidationError("source and sink regions share nodes");
        role[i] = 2;
    }

    VoltageFunction v;
    v.source = spec.source;
    v.values.assign(n, 0.0);
    for (auto i : spec.source.mask) v.values[i] = 1.0;
    SolveReport report;
    report.contraction_bound = 1.0;

    const auto labels = graph.component_labels();
    const std::size_t n_comp = *std::ranges::max_element(labels) + 1;
    std::vector<std::uint8_t> has_src(n_comp, 0), has_sink(n_comp, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (role[i] == 1) has_src[labels[i]] = 1;
        if (role[i] == 2) has_sink[labels[i]] = 1;
    }
    std::vector<std::uint32_t> free_nodes;
    std::size_t floating = 0, source_only = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (role[i] != 0) continue;
        const auto c = labels[i];
        if (has_src[c] && has_sink[c]) {
            free_nodes.push_back(static_cast<std::uint32_t>(i));
        } else if (has_src[c]) {
            v.values[i] = 1.0;
            ++source_only;
        } else {
            ++floating;
        }
    }
    if (floating > 0)
        report.warnings.push_back(std::to_string(floating) +
                                  " nodes lie in components without a source; set to 0");
    if (source_only > 0)
        report.warnings.push_back(std::to_string(source_only) +
                                  " nodes lie in components without a sink; set to 1");

    std::vector<double> start = v.values;
    detail::jacobi_sweep(graph, 0.0, free_nodes, v.values, start);
    v.values = std::move(start);
    const auto stats = detail::iterate_to_fixed_point(graph, 0.0, free_nodes, v.values, cfg.tol, cfg.max_iters);
    report.iterations = stats.iterations;
    report.final_residual = stats.final_residual;
    report.contraction_ratio_observed = stats.max_ratio;
    report.converged = stats.converged;
    if (!stats.converged) report.warnings.push_back("max_iters reached before the tolerance was met");
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(v), std::move(report)};
}

LaplacianSolveResult laplacian_solve(const GroundedGraph& graph, std::span<const double> rhs,
                                     const CgConfig& cfg) {
    const std::size_t n = graph.size();
    if (rhs.size() != n) throw ValidationError("laplacian_solve: rhs length differs from node count");
    const double total = std::accumulate(rhs.begin(), rhs.end(), 0.0);
    if (std::abs(total) > 1e-9)
        throw ValidationError("laplacian_solve: rhs must be mean zero (sum = " + std::to_string(total) + ")");
    if (!graph.is_connected()) throw NumericalError("laplacian_solve: graph is disconnected");

    LaplacianSolveResult res;
    res.x.assign(n, 0.0);
    std::vector<double> r(rhs.begin(), rhs.end());
    recenter(r);
    const double b_norm = std::sqrt(dot(r, r));
    if (b_norm == 0.0) return res;

    const std::size_t cap = cfg.max_iters > 0 ? cfg.max_iters : 20 * n;
    std::vector<double> p = r, Ap(n);
    double rr = dot(r, r);
    while (res.iterations < cap && std::sqrt(rr) > cfg.rel_tol * b_norm) {
        laplacian_apply(graph, p, Ap);
        const double alpha = rr / dot(p, Ap);
        for (std::size_t i = 0; i < n; ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        recenter(res.x);
        recenter(r);
        const double rr_new = dot(r, r);
        const double beta = rr_new / rr;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        rr = rr_new;
        ++res.iterations;
    }

    // report the true residual, not the recursively updated one
    std::vector<double> Lx(n);
    laplacian_apply(graph, res.x, Lx);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err += (Lx[i] - rhs[i]) * (Lx[i] - rhs[i]);
    res.relative_residual = std::sqrt(err) / b_norm;
    if (res.relative_residual > cfg.rel_tol * 10.0 && std::sqrt(rr) > cfg.rel_tol * b_norm)
        throw NumericalError("laplacian_solve: no convergence within " + std::to_string(cap) +
                             " iterations (relative residual " + std::to_string(res.relative_residual) + ")");
    return res;
}

std::vector<double> er_rhs(std::size_t n, const SourceSinkSpec& spec) {
    std::vector<double> rhs(n, 0.0);
    const double p_s = static_cast<double>(spec.source.mask.size()) / static_cast<double>(n);
    const double p_g = static_cast<double>(spec.sink.mask.size()) / static_cast<double>(n);
    switch (spec.mode) {
        case BaselineMethod::region_er:
            for (auto i : spec.source.mask) rhs[i] += 1.0;
            for (auto i : spec.sink.mask) rhs[i] -= 1.0;
            for (auto& x : rhs) x -= p_s - p_g;
            break;
        case BaselineMethod::density_er: {
            rhs[spec.source_node] += p_s;
            rhs[spec.sink_node] -= p_g;
            // the shift that makes this vector mean zero is (p_s - p_g) / n
            const double mean = (p_s - p_g) / static_cast<double>(n);
            for (auto& x : rhs) x -= mean;
            break;
        }
        case BaselineMethod::point_er:
            rhs[spec.source_node] += 1.0;
            rhs[spec.sink_node] -= 1.0;
            break;
        case BaselineMethod::pm:
            throw ValidationError("er_rhs: pm is not an effective-resistance method");
    }
    return rhs;
}

LaplacianSolveResult er_voltage(const GroundedGraph& graph, const SourceSinkSpec& spec, const CgConfig& cfg) {
    const auto rhs = er_rhs(graph.size(), spec);
    return laplacian_solve(graph, rhs, cfg);
}

double effective_resistance(const GroundedGraph& graph, std::size_t l, std::size_t k, const CgConfig& cfg) {
    if (l >= graph.size() || k >= graph.size()) throw ValidationError("effective_resistance: node out of range");
    if (l == k) return 0.0;
    std::vector<double> rhs(graph.size(), 0.0);
    rhs[l] = 1.0;
    rhs[k] = -1.0;
    const auto res = laplacian_solve(graph, rhs, cfg);
    return res.x[l] - res.x[k];
}

}  // namespace gvolt
