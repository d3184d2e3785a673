#include "gvolt/graph.hpp"

#include "gvolt/errors.hpp"
#include "gvolt/neighbors.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace gvolt {

GroundedGraph GroundedGraph::from_edges(std::size_t n, std::span<const Edge> edges, double rho,
                                        std::optional<KernelSpec> kernel,
                                        std::shared_ptr<const PointCloud> cloud) {
    if (n < 1) throw ValidationError("graph: node count must be >= 1");
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ValidationError("rho_g: must be finite and >= 0");
    if (cloud && cloud->size() != n) throw ValidationError("graph: point cloud size differs from node count");

    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(n);
    for (const auto& e : edges) {
        if (e.i >= n || e.j >= n)
            throw ValidationError("graph: edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                                  ") references a node >= n");
        if (e.i == e.j) throw ValidationError("graph: self-loop at node " + std::to_string(e.i));
        if (!(e.weight > 0.0) || !std::isfinite(e.weight))
            throw ValidationError("graph: edge weights must be positive and finite");
        rows[e.i].emplace_back(e.j, e.weight);
        rows[e.j].emplace_back(e.i, e.weight);
    }

    GroundedGraph g;
    g.rho_ = rho;
    g.kernel_ = kernel;
    g.cloud_ = std::move(cloud);
    g.offsets_.assign(n + 1, 0);
    g.degree_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + rows[i].size();
    g.nbr_.resize(g.offsets_[n]);
    g.wts_.resize(g.offsets_[n]);
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = rows[i];
        std::ranges::sort(row, {}, &std::pair<std::uint32_t, double>::first);
        for (std::size_t k = 1; k < row.size(); ++k) {
            if (row[k].first == row[k - 1].first)
                throw ValidationError("graph: duplicate edge (" + std::to_string(i) + ", " +
                                      std::to_string(row[k].first) + ")");
        }
        double deg = 0.0;
        for (std::size_t k = 0; k < row.size(); ++k) {
            g.nbr_[g.offsets_[i] + k] = row[k].first;
            g.wts_[g.offsets_[i] + k] = row[k].second;
            deg += row[k].second;
        }
        g.degree_[i] = deg;
    }
    return g;
}

double GroundedGraph::max_degree() const {
    return degree_.empty() ? 0.0 : *std::ranges::max_element(degree_);
}

double GroundedGraph::mean_degree() const {
    if (degree_.empty()) return 0.0;
    return std::accumulate(degree_.begin(), degree_.end(), 0.0) / static_cast<double>(degree_.size());
}

GroundedGraph GroundedGraph::with_rho(double rho) const {
    if (!(rho >= 0.0) || !std::isfinite(rho)) throw ValidationError("rho_g: must be finite and >= 0");
    GroundedGraph g = *this;
    g.rho_ = rho;
    return g;
}

std::vector<Edge> GroundedGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (std::size_t i = 0; i < size(); ++i) {
        auto nb = neighbors(i);
        auto w = weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            if (nb[k] > i) out.push_back({static_cast<std::uint32_t>(i), nb[k], w[k]});
        }
    }
    return out;
}

std::vector<std::uint32_t> GroundedGraph::component_labels() const {
    constexpr auto unset = static_cast<std::uint32_t>(-1);
    std::vector<std::uint32_t> label(size(), unset);
    std::vector<std::uint32_t> stack;
    std::uint32_t next = 0;
    for (std::size_t s = 0; s < size(); ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        stack.push_back(static_cast<std::uint32_t>(s));
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            for (auto v : neighbors(u)) {
                if (label[v] == unset) {
                    label[v] = next;
                    stack.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

bool GroundedGraph::is_connected() const {
    const auto labels = component_labels();
    return std::ranges::all_of(labels, [](std::uint32_t l) { return l == 0; });
}

GroundedGraph build_grounded_graph(std::shared_ptr<const PointCloud> cloud, const KernelSpec& kernel,
                                   double rho_g, const GraphOptions& opts) {
    if (!cloud) throw ValidationError("graph: null point cloud");
    kernel.validate();
    const std::size_t n = cloud->size();
    if (n < 2) throw ValidationError("graph: need at least 2 points, got " + std::to_string(n));
    if (!(rho_g >= 0.0) || !std::isfinite(rho_g)) throw ValidationError("rho_g: must be finite and >= 0");
    if (n > std::numeric_limits<std::uint32_t>::max()) throw ValidationError("graph: too many points");

    const double inv_n = 1.0 / static_cast<double>(n);
    std::vector<Edge> edges;

    const bool use_grid = kernel.kind == KernelSpec::Kind::radial || opts.gaussian_cutoff;
    if (use_grid) {
        const double radius = kernel.kind == KernelSpec::Kind::radial
                                  ? kernel.bandwidth
                                  : opts.cutoff_sigmas * kernel.bandwidth;
        GridIndex grid(cloud->points, radius);
        std::vector<std::pair<std::uint32_t, double>> found;
        for (std::size_t i = 0; i < n; ++i) {
            found.clear();
            grid.for_each_within(cloud->row(i), radius, [&](std::uint32_t j, double dist) {
                if (j > i) found.emplace_back(j, dist);
            });
            std::ranges::sort(found);
            for (const auto& [j, dist] : found) {
                const double k = kernel.at_distance(dist);
                if (k > 0.0) edges.push_back({static_cast<std::uint32_t>(i), j, k * inv_n});
            }
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double k = kernel.at_distance(euclidean_distance(cloud->row(i), cloud->row(j)));
                if (k > 0.0)
                    edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), k * inv_n});
            }
        }
    }
    return GroundedGraph::from_edges(n, edges, rho_g, kernel, std::move(cloud));
}

GroundedGraph build_grounded_graph(const PointCloud& cloud, const KernelSpec& kernel, double rho_g,
                                   const GraphOptions& opts) {
    return build_grounded_graph(std::make_shared<const PointCloud>(cloud), kernel, rho_g, opts);
}

SourceRegion select_source(const PointCloud& cloud, std::span<const double> center, double radius) {
    if (static_cast<int>(center.size()) != cloud.dim())
        throw ValidationError("source.center: dimension " + std::to_string(center.size()) +
                              " does not match the point cloud (" + std::to_string(cloud.dim()) + ")");
    if (!(radius >= 0.0) || !std::isfinite(radius))
        throw ValidationError("source.radius: must be finite and >= 0");
    SourceRegion src;
    src.center = Eigen::Map<const Vector>(center.data(), static_cast<Eigen::Index>(center.size()));
    src.radius = radius;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (euclidean_distance(cloud.row(i), center) <= radius) src.mask.push_back(i);
    }
    if (src.mask.empty()) throw EmptySourceError();
    return src;
}

SourceRegion source_from_nodes(std::size_t n, std::vector<std::size_t> nodes) {
    std::ranges::sort(nodes);
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    if (nodes.empty()) throw EmptySourceError();
    if (nodes.back() >= n) throw ValidationError("source: node index out of range");
    SourceRegion src;
    src.mask = std::move(nodes);
    return src;
}

}  // namespace gvolt
