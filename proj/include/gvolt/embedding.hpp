#pragma once

#include "gvolt/graph.hpp"
#include "gvolt/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gvolt {

enum class LandmarkStrategy { uniform_random, farthest_point };

std::string to_string(LandmarkStrategy s);
LandmarkStrategy landmark_strategy_from_string(const std::string& name);

struct LandmarkSet {
    std::vector<std::size_t> indices;  // landmark centers, distinct
    double radius_s = 0.0;             // shared source radius
    LandmarkStrategy strategy = LandmarkStrategy::uniform_random;
    std::uint64_t seed = 0;
    /// Optional exact ball centers (one row per landmark); when absent the
    /// landmark node positions are used.
    std::optional<RowMatrix> centers;
};

/// Landmarks at given ambient points; `indices` become the nearest samples.
LandmarkSet landmarks_at(const PointCloud& cloud, const RowMatrix& centers, double radius_s);

/// uniform_random: a seeded partial shuffle, so the first k landmarks drawn
/// for m > k equal the k landmarks drawn with the same seed.
/// farthest_point: greedy max-min ambient distance from a seeded first pick.
LandmarkSet select_landmarks(const PointCloud& cloud, std::size_t m, LandmarkStrategy strategy,
                             std::uint64_t seed, double radius_s);

struct Embedding {
    Matrix Z;  // n x m, column i = voltage of landmark i
    LandmarkSet landmarks;
    std::vector<SolveReport> reports;
};

/// One independent grounded solve per landmark. `threads` > 1 fans the
/// landmarks out over worker threads; the result does not depend on it.
Embedding voltage_embedding(const GroundedGraph& graph, const LandmarkSet& landmarks,
                            const SolverConfig& cfg, unsigned threads = 1);

struct MdsResult {
    Matrix coords;           // n x d, U_d * Sigma_d
    Vector singular_values;  // all of them, descending
    Matrix right_vectors;    // m x d, V_d
};

/// Centre the columns of Z, take the thin SVD and keep the leading d scaled
/// left singular vectors. Each left vector is signed so that its
/// largest-magnitude entry is positive.
MdsResult mds_project(const Matrix& Z, int d);

struct ProcrustesResult {
    Matrix aligned;      // s * Xc * Q + mean(Y)
    Matrix rotation;     // Q, orthogonal (reflections allowed)
    double scale = 1.0;  // s; 1 unless scaling is enabled
    double error = 0.0;  // ||s Xc Q - Yc||_F / ||Yc||_F
};

/// Orthogonal Procrustes after centering both sides. With `allow_scaling`
/// a global scale factor is fitted too, which is what comparing an MDS
/// projection (arbitrary units) against reference coordinates needs.
ProcrustesResult procrustes_align(const Matrix& X, const Matrix& Y, bool allow_scaling = false);

struct InjectivityReport {
    std::vector<std::pair<std::size_t, std::size_t>> violations;
    double min_margin = 0.0;  // min embedding distance among tested far pairs
    std::size_t pairs_tested = 0;
    std::size_t far_pairs = 0;
};

/// Samples `pair_budget` random pairs; a pair farther than `epsilon` apart in
/// the ambient space whose embedding rows are within `eta` is a violation.
InjectivityReport check_injectivity(const Matrix& Z, const PointCloud& cloud, double epsilon,
                                    double eta = 1e-12, std::size_t pair_budget = 100000,
                                    std::uint64_t seed = 0);

}  // namespace gvolt
