#pragma once

#include "gvolt/graph.hpp"
#include "gvolt/manifold.hpp"
#include "gvolt/solver.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace gvolt {

/// Binned voltage as a function of distance from a source center: geodesic
/// on spheres, Euclidean elsewhere.
/// Values in [0, 1] and exactly 1 on the source mask.
bool satisfies_max_principle(const VoltageFunction& v);

struct RadialProfile {
    std::vector<double> bin_edges;  // n_bins + 1, equal width, starting at 0
    std::vector<double> bin_mean;   // NaN where bin_count == 0
    std::vector<double> bin_stddev;
    std::vector<std::size_t> bin_count;
    std::size_t overflow = 0;  // samples beyond the last edge
    bool geodesic = false;

    [[nodiscard]] std::size_t bins() const { return bin_count.size(); }
    [[nodiscard]] bool defined(std::size_t k) const { return bin_count[k] > 0; }
    [[nodiscard]] double center(std::size_t k) const { return 0.5 * (bin_edges[k] + bin_edges[k + 1]); }
    [[nodiscard]] double width() const { return bin_edges[1] - bin_edges[0]; }
    [[nodiscard]] double stderr_of(std::size_t k) const;
    /// Bin containing distance z, if it lies within the profile range.
    [[nodiscard]] std::optional<std::size_t> bin_of(double z) const;
};

/// Bins partition [0, max_distance]; without max_distance the range ends at
/// the farthest sample, so counts sum to n.
RadialProfile radial_profile(const PointCloud& cloud, std::span<const double> values,
                             std::span<const double> center, std::size_t n_bins,
                             std::optional<double> max_distance = std::nullopt);

struct MonotoneReport {
    bool ok = true;
    std::vector<std::size_t> violations;  // bin k whose next nonempty bin rises by > slack
};

/// Non-increasing check over the nonempty bins lying beyond the source radius.
MonotoneReport check_monotone(const RadialProfile& profile, double slack, double source_radius);

/// Where the decay envelopes live: the unit sphere S^{dim-1}, or a solid
/// ball in R^dim whose total volume is `domain_volume` (the sampling
/// probability measure is volume / domain_volume).
struct BoundsGeometry {
    enum class Kind { sphere, disk };
    Kind kind = Kind::disk;
    int dim = 2;
    double domain_volume = 1.0;

    static BoundsGeometry from_manifold(const ManifoldSpec& spec);
};

/// Exponential envelopes for the radial profile around a source center.
struct DecayBounds {
    BoundsGeometry geometry;
    double r = 0.0;
    double rho = 0.0;
    double source_radius = 0.0;
    double a = 0.0;  // probability mass of a kernel ball
    double gamma = 0.0;
    double gamma_stderr = 0.0;
    double step = 0.0;        // phi(r) on spheres, r on disks
    double lower_step = 0.0;  // phi(r/2) on spheres, r on disks
    double upper_rate = 0.0;  // ln(1 + 2 rho / a)
    double lower_rate = 0.0;  // ln((a + rho) / gamma)
    double lower_exponent = 1.0;  // 2 on disks

    /// h(z1 + t * step) <= exp(-t * upper_rate)
    [[nodiscard]] double upper_envelope(double t) const;
    /// h(z1 + t * lower_step) >= exp(-lower_exponent * t * lower_rate)
    [[nodiscard]] double lower_envelope(double t) const;
    /// One standard error of the lower envelope due to the Monte Carlo gamma.
    [[nodiscard]] double lower_envelope_stderr(double t) const;
};

/// `a` in closed form; gamma by Monte Carlo at the worst-case placement: the
/// mass of the kernel ball around a point at distance `step` from the
/// center that lies within step - lower half-step of the center.
DecayBounds theoretical_bounds(double r, double rho, const BoundsGeometry& geometry, double source_radius,
                               std::size_t mc_samples = 1'000'000, std::uint64_t seed = 0);

struct MassEstimate {
    double value = 0.0;
    double stderr_value = 0.0;
};

/// Monte Carlo estimate of the kernel-ball mass at an interior point, drawn
/// uniformly over the whole domain (independent of the closed form).
MassEstimate estimate_kernel_mass_mc(double r, const BoundsGeometry& geometry, std::size_t samples,
                                     std::uint64_t seed = 0);

struct EnvelopeRow {
    int t = 0;
    double z = 0.0;
    double h = 0.0;
    double h_stderr = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool upper_applies = false;  // z >= 2r
    bool within = false;
};

/// Compares the profile at z = t * step (t = 1..t_max) with the envelopes,
/// widened by `sigmas` standard errors of the bin mean and of gamma.
std::vector<EnvelopeRow> compare_envelopes(const RadialProfile& profile, const DecayBounds& bounds, int t_max,
                                           double sigmas = 3.0);

struct SupportReport {
    double tau = 0.0;
    double r_supp_empirical = 0.0;
    double r_l = 0.0;
    double r_u = 0.0;
    bool degenerate = false;  // no bin beyond the source reaches tau
};

/// r_supp = largest bin center beyond the source radius whose mean >= tau.
SupportReport support_radius(const RadialProfile& profile, double tau, const DecayBounds& bounds);

struct ConvergenceSpec {
    ManifoldSpec manifold;
    KernelSpec kernel;
    double rho_g = 1.0;
    Vector source_center;
    double source_radius = 0.0;
    std::vector<std::size_t> n_list;  // increasing
    RowMatrix eval_grid;
    std::vector<std::uint64_t> seeds;
    SolverConfig solver;
    unsigned threads = 1;
};

struct ConvergenceCell {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::optional<double>> values;  // extension on eval_grid
    std::size_t iterations = 0;
    bool max_principle = true;  // node values in [0, 1], source exactly 1
};

struct ConvergencePair {
    std::size_t n_from = 0;
    std::size_t n_to = 0;
    std::vector<double> sup_diff;   // per seed
    std::vector<double> mean_diff;  // per seed
    std::vector<std::size_t> excluded;  // per seed, grid points lacking a value
    double median_sup = 0.0;
    double median_mean = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceCell> cells;  // seed-major, n-minor
    std::vector<ConvergencePair> pairs;  // one per consecutive (n, n_next)
    [[nodiscard]] const ConvergenceCell& cell(std::size_t seed_index, std::size_t n_index) const;
};

/// Sample, build, solve and extend for every (n, seed); then compare
/// consecutive n on the evaluation grid. Samples with a common seed are
/// nested.
ConvergenceReport convergence_study(const ConvergenceSpec& spec);

/// `count` equally spaced points on [lo, hi] as a count x 1 matrix.
RowMatrix line_grid(double lo, double hi, std::size_t count);
/// k x k cell-centred grid over the unit square.
RowMatrix square_grid(std::size_t k);

double median(std::vector<double> values);

}  // namespace gvolt
