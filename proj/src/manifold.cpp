#include "gvolt/manifold.hpp"

#include "gvolt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace gvolt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double unit_sphere_area(int d) {
    // surface of S^{d-1} in R^d
    return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

double azimuth_of(std::span<const double> x) {
    double phi = std::atan2(x[1], x[0]);
    if (phi < 0.0) phi += kTwoPi;
    return phi;
}

}  // namespace

ManifoldSpec ManifoldSpec::interval(double lo, double hi) {
    ManifoldSpec s;
    s.kind = Kind::interval;
    s.lo = lo;
    s.hi = hi;
    s.dim = 1;
    return s;
}

ManifoldSpec ManifoldSpec::unit_square() {
    ManifoldSpec s;
    s.kind = Kind::unit_square;
    s.dim = 2;
    return s;
}

ManifoldSpec ManifoldSpec::sphere(int dim) {
    ManifoldSpec s;
    s.kind = Kind::sphere;
    s.dim = dim;
    return s;
}

ManifoldSpec ManifoldSpec::sphere_segment(int dim, double azimuth_lo, double azimuth_hi) {
    ManifoldSpec s;
    s.kind = Kind::sphere_segment;
    s.dim = dim;
    s.azimuth_lo = azimuth_lo;
    s.azimuth_hi = azimuth_hi;
    return s;
}

ManifoldSpec ManifoldSpec::ball(int dim, double radius) {
    ManifoldSpec s;
    s.kind = Kind::ball;
    s.dim = dim;
    s.radius = radius;
    return s;
}

ManifoldSpec ManifoldSpec::unit_volume_ball(int dim) {
    return ball(dim, std::pow(1.0 / unit_ball_volume(dim), 1.0 / dim));
}

ManifoldSpec ManifoldSpec::external(int dim) {
    ManifoldSpec s;
    s.kind = Kind::external;
    s.dim = dim;
    return s;
}

int ManifoldSpec::ambient_dim() const {
    switch (kind) {
        case Kind::interval: return 1;
        case Kind::unit_square: return 2;
        default: return dim;
    }
}

double ManifoldSpec::volume() const {
    switch (kind) {
        case Kind::interval: return hi - lo;
        case Kind::unit_square: return 1.0;
        case Kind::sphere: return unit_sphere_area(dim);
        case Kind::sphere_segment:
            return unit_sphere_area(dim) * (azimuth_hi - azimuth_lo) / kTwoPi;
        case Kind::ball: return unit_ball_volume(dim) * std::pow(radius, dim);
        case Kind::external: break;
    }
    throw ValidationError("manifold.kind: external point sets have no known volume");
}

void ManifoldSpec::validate() const {
    switch (kind) {
        case Kind::interval:
            if (!(lo < hi)) throw ValidationError("manifold.lo: interval requires lo < hi");
            break;
        case Kind::unit_square:
            break;
        case Kind::sphere:
            if (dim < 2) throw ValidationError("manifold.dim: sphere requires dim >= 2");
            break;
        case Kind::sphere_segment:
            if (dim < 2) throw ValidationError("manifold.dim: sphere_segment requires dim >= 2");
            if (!(azimuth_lo >= 0.0 && azimuth_lo < azimuth_hi && azimuth_hi <= kTwoPi))
                throw ValidationError(
                    "manifold.azimuth: azimuth range must be a sub-interval of [0, 2pi)");
            break;
        case Kind::ball:
            if (dim < 1) throw ValidationError("manifold.dim: ball requires dim >= 1");
            if (!(radius > 0.0)) throw ValidationError("manifold.radius: ball requires radius > 0");
            break;
        case Kind::external:
            if (dim < 1) throw ValidationError("manifold.dim: external requires dim >= 1");
            break;
    }
}

bool ManifoldSpec::contains(std::span<const double> x, double tol) const {
    if (static_cast<int>(x.size()) != ambient_dim()) return false;
    auto sq_norm = [&] {
        double s = 0.0;
        for (double v : x) s += v * v;
        return s;
    };
    switch (kind) {
        case Kind::interval:
            return x[0] >= lo - tol && x[0] <= hi + tol;
        case Kind::unit_square:
            return std::ranges::all_of(x, [&](double v) { return v >= -tol && v <= 1.0 + tol; });
        case Kind::sphere:
            return std::abs(std::sqrt(sq_norm()) - 1.0) <= tol;
        case Kind::sphere_segment: {
            if (std::abs(std::sqrt(sq_norm()) - 1.0) > tol) return false;
            const double phi = azimuth_of(x);
            // the pole (x0 = x1 = 0) has no azimuth and belongs to every segment
            if (std::hypot(x[0], x[1]) <= tol) return true;
            return phi >= azimuth_lo - tol && phi <= azimuth_hi + tol;
        }
        case Kind::ball:
            return std::sqrt(sq_norm()) <= radius + tol;
        case Kind::external:
            return true;
    }
    return false;
}

std::string to_string(ManifoldSpec::Kind kind) {
    switch (kind) {
        case ManifoldSpec::Kind::interval: return "interval";
        case ManifoldSpec::Kind::unit_square: return "unit_square";
        case ManifoldSpec::Kind::sphere: return "sphere";
        case ManifoldSpec::Kind::sphere_segment: return "sphere_segment";
        case ManifoldSpec::Kind::ball: return "ball";
        case ManifoldSpec::Kind::external: return "external";
    }
    return "unknown";
}

ManifoldSpec::Kind manifold_kind_from_string(const std::string& name) {
    using K = ManifoldSpec::Kind;
    if (name == "interval") return K::interval;
    if (name == "unit_square") return K::unit_square;
    if (name == "sphere") return K::sphere;
    if (name == "sphere_segment") return K::sphere_segment;
    if (name == "ball" || name == "disk") return K::ball;
    if (name == "external") return K::external;
    throw ValidationError("manifold.kind: unknown manifold '" + name + "'");
}

void KernelSpec::validate() const {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw ValidationError("kernel.bandwidth: must be a positive finite number");
}

double KernelSpec::at_distance(double dist) const {
    if (kind == Kind::radial) return dist <= bandwidth ? 1.0 : 0.0;
    return std::exp(-dist * dist / (2.0 * bandwidth * bandwidth));
}

std::string to_string(KernelSpec::Kind kind) {
    return kind == KernelSpec::Kind::radial ? "radial" : "gaussian";
}

KernelSpec::Kind kernel_kind_from_string(const std::string& name) {
    if (name == "radial") return KernelSpec::Kind::radial;
    if (name == "gaussian") return KernelSpec::Kind::gaussian;
    throw ValidationError("kernel.kind: unknown kernel '" + name + "'");
}

PointCloud sample_manifold(const ManifoldSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (spec.kind == ManifoldSpec::Kind::external)
        throw ValidationError("manifold.kind: external point sets cannot be sampled");
    if (n < 1) throw ValidationError("n: sample size must be >= 1");

    const int d = spec.ambient_dim();
    PointCloud cloud;
    cloud.manifold = spec;
    cloud.seed = seed;
    cloud.points.resize(static_cast<Eigen::Index>(n), d);

    // Points are drawn one after another from a single stream, which makes
    // smaller samples prefixes of larger ones with the same seed.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        auto row = cloud.points.row(static_cast<Eigen::Index>(i));
        switch (spec.kind) {
            case ManifoldSpec::Kind::interval:
                row(0) = spec.lo + (spec.hi - spec.lo) * unif(rng);
                break;
            case ManifoldSpec::Kind::unit_square:
                row(0) = unif(rng);
                row(1) = unif(rng);
                break;
            case ManifoldSpec::Kind::sphere:
            case ManifoldSpec::Kind::sphere_segment:
            case ManifoldSpec::Kind::ball: {
                double norm2 = 0.0;
                do {
                    norm2 = 0.0;
                    for (int j = 0; j < d; ++j) {
                        row(j) = gauss(rng);
                        norm2 += row(j) * row(j);
                    }
                } while (norm2 == 0.0);
                row /= std::sqrt(norm2);
                if (spec.kind == ManifoldSpec::Kind::sphere_segment) {
                    // isotropic Gaussians have uniform azimuth independent of
                    // everything else, so redrawing it keeps uniformity
                    const double planar = std::hypot(row(0), row(1));
                    const double phi =
                        spec.azimuth_lo + (spec.azimuth_hi - spec.azimuth_lo) * unif(rng);
                    row(0) = planar * std::cos(phi);
                    row(1) = planar * std::sin(phi);
                    row /= row.norm();
                } else if (spec.kind == ManifoldSpec::Kind::ball) {
                    row *= spec.radius * std::pow(unif(rng), 1.0 / d);
                }
                break;
            }
            case ManifoldSpec::Kind::external:
                break;
        }
    }
    return cloud;
}

double euclidean_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ValidationError("dimension mismatch: " + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - y[i];
        s += diff * diff;
    }
    return std::sqrt(s);
}

double eval_kernel(const KernelSpec& k, std::span<const double> x, std::span<const double> y) {
    return k.at_distance(euclidean_distance(x, y));
}

double chord_to_angle(double r) {
    if (!(r > 0.0 && r <= 2.0))
        throw ValidationError("chord_to_angle: chord length must lie in (0, 2]");
    return 2.0 * std::asin(r / 2.0);
}

double geodesic_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("geodesic_distance: dimension mismatch");
    double xx = 0.0, yy = 0.0, xy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xx += x[i] * x[i];
        yy += y[i] * y[i];
        xy += x[i] * y[i];
    }
    if (std::abs(std::sqrt(xx) - 1.0) > 1e-9 || std::abs(std::sqrt(yy) - 1.0) > 1e-9)
        throw ValidationError("geodesic_distance: inputs must be unit vectors");
    return std::acos(std::clamp(xy, -1.0, 1.0));
}

}  // namespace gvolt
