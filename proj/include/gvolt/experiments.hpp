#pragma once

// Scripted pipelines behind the figure recipes and the acceptance suite.
// Pure computation: nothing here touches the filesystem.

#include "gvolt/analysis.hpp"
#include "gvolt/embedding.hpp"
#include "gvolt/er.hpp"

#include <cstdint>
#include <vector>

namespace gvolt::experiments {

inline constexpr double kKernelRadius = 0.05;

// ---- grounded voltage on the line and the square ----------------------------

inline constexpr double kLineRhoLarge = 0.01;
inline constexpr double kLineRhoSmall = 0.001;
inline constexpr double kSquareRho = 0.01;

/// Line [0,3], source ball of radius 0.5 at 2.5 (i.e. [2,3]), 50-point grid.
ConvergenceSpec line_convergence(double rho_g, std::vector<std::size_t> n_list,
                                 std::vector<std::uint64_t> seeds);
/// Unit square, source ball of radius 0.1 at (0.1, 0.1); evaluated along the
/// diagonal from the corner, the only ray on which the profile is radial.
ConvergenceSpec square_convergence(double rho_g, std::vector<std::size_t> n_list,
                                   std::vector<std::uint64_t> seeds);

/// Pointwise comparison of two studies on the same grid and seeds: fraction of
/// grid points beyond `from` (first coordinate) where the median over seeds
/// of `faster` is <= that of `slower` at the largest n.
double dominance_fraction(const ConvergenceReport& faster, const ConvergenceReport& slower,
                          const RowMatrix& grid, double from);

// ---- trivial limit of ER ------------------------------------------------------

struct ErRun {
    BaselineMethod method = BaselineMethod::pm;
    std::size_t n = 0;
    std::vector<double> values;                 // raw node values
    double max_abs = 0.0;
    double large_fraction = 0.0;                // share of nodes with |v| > 0.1 max|v|
    std::vector<std::optional<double>> field;   // normalized, extended to the grid
    std::size_t iterations = 0;
    bool max_principle = true;                  // pm only
};

struct ErCompare {
    std::vector<std::size_t> n_list;
    RowMatrix grid;
    std::vector<ErRun> runs;  // method-major: runs[m * n_list.size() + k]
    [[nodiscard]] const ErRun& run(BaselineMethod m, std::size_t k) const;
    /// sup over the grid of |field(n_k) - field(n_{k+1})|, points where either is undefined skipped.
    [[nodiscard]] std::vector<double> successive_sup(BaselineMethod m) const;
};

inline constexpr BaselineMethod kAllBaselines[] = {BaselineMethod::pm, BaselineMethod::region_er,
                                                   BaselineMethod::density_er, BaselineMethod::point_er};

/// Unit square, source (0.1,0.1) and sink (0.7,0.7) of radius 0.1, r = 0.05,
/// nested samples of one seed, 50x50 grid. Values are divided by max|v|
/// before extension so the fields are comparable across n.
ErCompare er_compare(const std::vector<std::size_t>& n_list, std::uint64_t seed,
                     const std::vector<BaselineMethod>& methods = {std::begin(kAllBaselines), std::end(kAllBaselines)});

// ---- decay envelopes and support on the disk ---------------------------------

struct DiskRun {
    std::uint64_t seed = 0;
    double rho_g = 0.0;
    std::vector<double> values;
    RadialProfile profile;
    std::vector<EnvelopeRow> envelope;
    SupportReport support;
    MonotoneReport monotone;
    SolveReport report;
    bool max_principle = false;
};

struct DiskDecay {
    DecayBounds bounds;
    std::vector<DiskRun> runs;  // one per seed, at rho_g = rho_ratio * a
    std::vector<DiskRun> sweep; // first seed, one per sweep ratio
};

struct DiskDecayConfig {
    std::size_t n = 8192;
    std::vector<std::uint64_t> seeds = {1, 2, 3};
    double r = kKernelRadius;
    double rho_ratio = 1.0;                        // rho_g / a
    std::vector<double> sweep_ratios = {0.25, 1.0, 4.0};
    double tau = 0.01;
    std::size_t n_bins = 40;
    int t_max = 5;
    std::size_t mc_samples = 1'000'000;
};

/// Unit-area disk, source ball of radius r at the center.
DiskDecay disk_decay(const DiskDecayConfig& cfg);

// ---- embeddings on the sphere -------------------------------------------------

struct SphereEmbeddingConfig {
    std::size_t n = 8192;
    std::vector<std::size_t> m_list = {3, 5, 7, 9};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    double r = 0.3;
    double rho_ratio = 0.1;  // rho_g / a, a = r^2 / 2 on the half sphere
    int project_dim = 3;
    unsigned threads = 1;
};

struct SphereEmbeddingRun {
    std::uint64_t seed = 0;
    std::size_t m = 0;
    Matrix Z;          // n x m
    MdsResult mds;
    ProcrustesResult procrustes;
    std::vector<std::size_t> landmarks;
};

struct SphereEmbedding {
    std::vector<SphereEmbeddingRun> runs;  // seed-major, m inner
    std::vector<double> median_error;      // per m
    std::vector<PointCloud> clouds;        // per seed
    bool max_principle = true;
};

/// Two-quadrant segment (azimuth [0, pi]) of S^2. Landmarks are nested
/// prefixes of one seeded draw, so a larger m only adds landmarks.
SphereEmbedding sphere_embedding(const SphereEmbeddingConfig& cfg);

struct InjectivityConfig {
    std::size_t n = 8192;
    std::uint64_t seed = 1;
    double r = 0.2;
    double rho_ratio = 0.1;  // rho_g / a, a = r^2 / 4 on S^2
    double eta = 1e-12;
    std::size_t pairs = 100000;
};

struct Injectivity {
    double epsilon = 0.0;
    InjectivityReport report;
    Matrix Z;
    bool max_principle = true;
};

/// S^2 with landmarks at the three standard basis vectors, r_s = r.
Injectivity sphere_injectivity(const InjectivityConfig& cfg);

}  // namespace gvolt::experiments
