#pragma once

#include "gvolt/manifold.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace gvolt {

struct Edge {
    std::uint32_t i = 0;
    std::uint32_t j = 0;
    double weight = 0.0;
};

/// Grounded metric resistor graph.
///
/// Stored edge weights are k(x_i, x_j) / n and the ground weight is rho_g
/// itself, so the fixed-point denominator rho_g + (1/n) sum_j k(x_i, x_j)
/// tends to rho + integral of k as n grows. Adjacency is symmetric CSR with
/// neighbors sorted ascending, no self-loops and no zero weights.
class GroundedGraph {
public:
    GroundedGraph() = default;

    /// Builds from an explicit undirected edge list (each pair listed once).
    static GroundedGraph from_edges(std::size_t n, std::span<const Edge> edges, double rho,
                                    std::optional<KernelSpec> kernel = std::nullopt,
                                    std::shared_ptr<const PointCloud> cloud = nullptr);

    [[nodiscard]] std::size_t size() const { return degree_.size(); }
    [[nodiscard]] std::span<const std::uint32_t> neighbors(std::size_t i) const {
        return {nbr_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    [[nodiscard]] std::span<const double> weights(std::size_t i) const {
        return {wts_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
    }
    [[nodiscard]] double degree(std::size_t i) const { return degree_[i]; }
    [[nodiscard]] std::span<const double> degrees() const { return degree_; }
    [[nodiscard]] double rho() const { return rho_; }
    [[nodiscard]] double max_degree() const;
    [[nodiscard]] double mean_degree() const;
    [[nodiscard]] std::size_t edge_count() const { return nbr_.size() / 2; }
    [[nodiscard]] const std::optional<KernelSpec>& kernel() const { return kernel_; }
    [[nodiscard]] const std::shared_ptr<const PointCloud>& cloud() const { return cloud_; }
    /// Same graph with a different ground weight.
    [[nodiscard]] GroundedGraph with_rho(double rho) const;

    /// Undirected edges with i < j, sorted by (i, j).
    [[nodiscard]] std::vector<Edge> edges() const;
    /// Connected-component label per node, labels numbered by first node.
    [[nodiscard]] std::vector<std::uint32_t> component_labels() const;
    [[nodiscard]] bool is_connected() const;

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<std::uint32_t> nbr_;
    std::vector<double> wts_;
    std::vector<double> degree_;
    double rho_ = 0.0;
    std::optional<KernelSpec> kernel_;
    std::shared_ptr<const PointCloud> cloud_;
};

struct GraphOptions {
    /// Drop Gaussian weights beyond cutoff_sigmas * sigma.
    bool gaussian_cutoff = true;
    double cutoff_sigmas = 3.0;
};

GroundedGraph build_grounded_graph(std::shared_ptr<const PointCloud> cloud, const KernelSpec& kernel,
                                   double rho_g, const GraphOptions& opts = {});
GroundedGraph build_grounded_graph(const PointCloud& cloud, const KernelSpec& kernel, double rho_g,
                                   const GraphOptions& opts = {});

/// Metric ball of sampled nodes pinned to voltage 1.
struct SourceRegion {
    Vector center;  // empty for an explicit node list
    double radius = 0.0;
    std::vector<std::size_t> mask;  // sorted ascending

    [[nodiscard]] bool has_geometry() const { return center.size() > 0; }
};

/// Nodes within Euclidean distance `radius` of `center`. Throws
/// EmptySourceError when none qualify.
SourceRegion select_source(const PointCloud& cloud, std::span<const double> center, double radius);
/// Explicit node set, e.g. for imported graphs without coordinates.
SourceRegion source_from_nodes(std::size_t n, std::vector<std::size_t> nodes);

}  // namespace gvolt
