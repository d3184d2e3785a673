#include "gvolt/embedding.hpp"

#include "gvolt/errors.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace gvolt {

std::string to_string(LandmarkStrategy s) {
    return s == LandmarkStrategy::uniform_random ? "uniform_random" : "farthest_point";
}

LandmarkStrategy landmark_strategy_from_string(const std::string& name) {
    if (name == "uniform_random" || name == "random") return LandmarkStrategy::uniform_random;
    if (name == "farthest_point" || name == "fps") return LandmarkStrategy::farthest_point;
    throw ValidationError("landmarks.strategy: unknown strategy '" + name + "'");
}

LandmarkSet select_landmarks(const PointCloud& cloud, std::size_t m, LandmarkStrategy strategy,
                             std::uint64_t seed, double radius_s) {
    const std::size_t n = cloud.size();
    if (m < 1) throw ValidationError("landmarks.m: must be >= 1");
    if (m > n)
        throw ValidationError("landmarks.m: " + std::to_string(m) + " landmarks requested from " +
                              std::to_string(n) + " points");
    LandmarkSet set;
    set.strategy = strategy;
    set.seed = seed;
    set.radius_s = radius_s;
    std::mt19937_64 rng(seed);

    if (strategy == LandmarkStrategy::uniform_random) {
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = 0; k < m; ++k) {
            std::uniform_int_distribution<std::size_t> pick(k, n - 1);
            std::swap(perm[k], perm[pick(rng)]);
        }
        set.indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
        return set;
    }

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::size_t current = pick(rng);
    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    set.indices.push_back(current);
    while (set.indices.size() < m) {
        for (std::size_t i = 0; i < n; ++i)
            min_dist[i] = std::min(min_dist[i], euclidean_distance(cloud.row(i), cloud.row(current)));
        // first index wins ties
        current = static_cast<std::size_t>(std::distance(min_dist.begin(), std::ranges::max_element(min_dist)));
        set.indices.push_back(current);
    }
    return set;
}

LandmarkSet landmarks_at(const PointCloud& cloud, const RowMatrix& centers, double radius_s) {
    if (centers.cols() != cloud.dim()) throw ValidationError("landmarks: center dimension mismatch");
    if (cloud.size() == 0) throw ValidationError("landmarks: empty cloud");
    LandmarkSet set;
    set.radius_s = radius_s;
    set.centers = centers;
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
        std::span<const double> q(centers.row(c).data(), static_cast<std::size_t>(centers.cols()));
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            const double d = euclidean_distance(cloud.row(i), q);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        set.indices.push_back(best);
    }
    return set;
}

Embedding voltage_embedding(const GroundedGraph& graph, const LandmarkSet& landmarks,
                            const SolverConfig& cfg, unsigned threads) {
    const auto& cloud = graph.cloud();
    if (!cloud) throw ValidationError("embedding: graph carries no point cloud");
    const std::size_t n = graph.size();
    const std::size_t m = landmarks.indices.size();
    if (m == 0) throw ValidationError("embedding: empty landmark set");
    {
        auto sorted = landmarks.indices;
        std::ranges::sort(sorted);
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("embedding: landmark indices must be distinct");
        if (sorted.back() >= n) throw ValidationError("embedding: landmark index out of range");
        if (landmarks.centers && (landmarks.centers->rows() != static_cast<Eigen::Index>(m) ||
                                  landmarks.centers->cols() != cloud->dim()))
            throw ValidationError("embedding: landmark centers must be m x d");
    }

    Embedding emb;
    emb.Z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    emb.landmarks = landmarks;
    emb.reports.resize(m);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t col = next.fetch_add(1);
            if (col >= m) return;
            try {
                const auto center = landmarks.centers
                                        ? std::span<const double>(landmarks.centers->row(static_cast<Eigen::Index>(col)).data(),
                                                                  static_cast<std::size_t>(landmarks.centers->cols()))
                                        : cloud->row(landmarks.indices[col]);
                const auto source = select_source(*cloud, center, landmarks.radius_s);
                auto [v, report] = solve(graph, source, cfg);
                for (std::size_t i = 0; i < n; ++i)
                    emb.Z(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(col)) = v.values[i];
                emb.reports[col] = std::move(report);
            } catch (const std::exception& e) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    const std::string msg = "landmark " + std::to_string(col) + " (node " +
                                            std::to_string(landmarks.indices[col]) + "): " + e.what();
                    if (dynamic_cast<const ValidationError*>(&e))
                        failure = std::make_exception_ptr(ValidationError(msg));
                    else
                        failure = std::make_exception_ptr(NumericalError(msg));
                }
                next = m;
                return;
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(m)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return emb;
}

MdsResult mds_project(const Matrix& Z, int d) {
    if (d < 1 || d > Z.cols())
        throw ValidationError("mds: target dimension " + std::to_string(d) + " must lie in [1, " +
                              std::to_string(Z.cols()) + "]");
    const Matrix Zs = Z.rowwise() - Z.colwise().mean();
    Eigen::BDCSVD<Matrix> svd(Zs, Eigen::ComputeThinU | Eigen::ComputeThinV);
    MdsResult out;
    out.singular_values = svd.singularValues();
    Matrix U = svd.matrixU().leftCols(d);
    Matrix V = svd.matrixV().leftCols(d);
    for (int k = 0; k < d; ++k) {
        Eigen::Index arg = 0;
        U.col(k).cwiseAbs().maxCoeff(&arg);
        if (U(arg, k) < 0.0) {
            U.col(k) *= -1.0;
            V.col(k) *= -1.0;
        }
    }
    out.coords = U * out.singular_values.head(d).asDiagonal();
    out.right_vectors = V;
    return out;
}

ProcrustesResult procrustes_align(const Matrix& X, const Matrix& Y, bool allow_scaling) {
    if (X.rows() != Y.rows() || X.cols() != Y.cols())
        throw ValidationError("procrustes: shape mismatch (" + std::to_string(X.rows()) + "x" +
                              std::to_string(X.cols()) + " vs " + std::to_string(Y.rows()) + "x" +
                              std::to_string(Y.cols()) + ")");
    const Eigen::RowVectorXd y_mean = Y.colwise().mean();
    const Matrix Xc = X.rowwise() - X.colwise().mean();
    const Matrix Yc = Y.rowwise() - y_mean;

    Eigen::JacobiSVD<Matrix> svd(Xc.transpose() * Yc, Eigen::ComputeFullU | Eigen::ComputeFullV);
    ProcrustesResult out;
    out.rotation = svd.matrixU() * svd.matrixV().transpose();
    if (allow_scaling) {
        const double xx = Xc.squaredNorm();
        out.scale = xx > 0.0 ? svd.singularValues().sum() / xx : 1.0;
    }
    const Matrix fitted = out.scale * Xc * out.rotation;
    const double y_norm = Yc.norm();
    out.error = y_norm > 0.0 ? (fitted - Yc).norm() / y_norm : (fitted - Yc).norm();
    out.aligned = fitted.rowwise() + y_mean;
    return out;
}

InjectivityReport check_injectivity(const Matrix& Z, const PointCloud& cloud, double epsilon, double eta,
                                    std::size_t pair_budget, std::uint64_t seed) {
    if (!(epsilon > 0.0)) throw ValidationError("injectivity.epsilon: must be > 0");
    if (!(eta >= 0.0)) throw ValidationError("injectivity.eta: must be >= 0");
    const std::size_t n = cloud.size();
    if (static_cast<std::size_t>(Z.rows()) != n)
        throw ValidationError("injectivity: embedding rows differ from the sample size");

    InjectivityReport rep;
    rep.min_margin = std::numeric_limits<double>::infinity();
    if (n < 2) return rep;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (std::size_t t = 0; t < pair_budget; ++t) {
        const std::size_t i = pick(rng);
        std::size_t j = pick(rng);
        while (j == i) j = pick(rng);
        ++rep.pairs_tested;
        if (euclidean_distance(cloud.row(i), cloud.row(j)) <= epsilon) continue;
        ++rep.far_pairs;
        const double gap = (Z.row(static_cast<Eigen::Index>(i)) - Z.row(static_cast<Eigen::Index>(j))).norm();
        rep.min_margin = std::min(rep.min_margin, gap);
        if (gap <= eta) rep.violations.emplace_back(std::min(i, j), std::max(i, j));
    }
    return rep;
}

}  // namespace gvolt
