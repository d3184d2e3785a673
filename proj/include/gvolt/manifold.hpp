#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>

namespace gvolt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Row-major storage so each point is a contiguous span.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Sampling domain. All coordinates are dimensionless.
///
/// Spheres are unit spheres S^{dim-1} in R^dim. A sphere_segment keeps the
/// points whose azimuth atan2(x1, x0) lies in [azimuth_lo, azimuth_hi].
///
/// `ball` is a solid d-ball centred at the origin; with the default radius
/// (1/sqrt(pi) in 2-D) it has unit volume, so the sampling probability
/// measure coincides with Lebesgue measure.
struct ManifoldSpec {
    enum class Kind { interval, unit_square, sphere, sphere_segment, ball, external };

    Kind kind = Kind::interval;
    double lo = 0.0;  // interval
    double hi = 1.0;
    int dim = 3;      // ambient dimension for sphere, sphere_segment, ball
    double azimuth_lo = 0.0;  // sphere_segment, radians in [0, 2pi]
    double azimuth_hi = 0.0;
    double radius = 0.0;      // ball

    static ManifoldSpec interval(double lo, double hi);
    static ManifoldSpec unit_square();
    static ManifoldSpec sphere(int dim);
    static ManifoldSpec sphere_segment(int dim, double azimuth_lo, double azimuth_hi);
    static ManifoldSpec ball(int dim, double radius);
    /// Points supplied from outside (e.g. a feature-space CSV); no membership
    /// constraint and no known volume.
    static ManifoldSpec external(int dim);
    /// Ball of unit volume in `dim` dimensions.
    static ManifoldSpec unit_volume_ball(int dim);

    [[nodiscard]] int ambient_dim() const;
    [[nodiscard]] bool is_spherical() const {
        return kind == Kind::sphere || kind == Kind::sphere_segment;
    }
    /// Lebesgue measure of the domain (length, area, surface area, volume).
    [[nodiscard]] double volume() const;
    /// Throws ValidationError naming the offending field.
    void validate() const;
    /// Membership predicate with absolute tolerance `tol`.
    [[nodiscard]] bool contains(std::span<const double> x, double tol = 1e-12) const;
};

std::string to_string(ManifoldSpec::Kind kind);
ManifoldSpec::Kind manifold_kind_from_string(const std::string& name);

struct KernelSpec {
    enum class Kind { radial, gaussian };
    Kind kind = Kind::radial;
    double bandwidth = 0.05;  // r for radial, sigma for gaussian

    static KernelSpec radial(double r) { return {Kind::radial, r}; }
    static KernelSpec gaussian(double sigma) { return {Kind::gaussian, sigma}; }

    void validate() const;
    /// Kernel value from a Euclidean distance.
    [[nodiscard]] double at_distance(double dist) const;
};

std::string to_string(KernelSpec::Kind kind);
KernelSpec::Kind kernel_kind_from_string(const std::string& name);

/// n x d sample; row order is the node order used everywhere downstream.
struct PointCloud {
    RowMatrix points;
    ManifoldSpec manifold;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
    [[nodiscard]] int dim() const { return static_cast<int>(points.cols()); }
    [[nodiscard]] std::span<const double> row(std::size_t i) const {
        return {points.data() + i * static_cast<std::size_t>(points.cols()),
                static_cast<std::size_t>(points.cols())};
    }
};

/// Uniform i.i.d. sample. Same (spec, n, seed) gives bit-identical output,
/// and the first k rows of an n-sample equal the k-sample for k < n.
PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed);

double eval_kernel(const KernelSpec& k, std::span<const double> x, std::span<const double> y);

double euclidean_distance(std::span<const double> x, std::span<const double> y);

/// Angle subtending a chord of length r on the unit circle, 2*asin(r/2).
double chord_to_angle(double r);

/// Great-circle distance between unit vectors.
double geodesic_distance(std::span<const double> x, std::span<const double> y);

}  // namespace gvolt
