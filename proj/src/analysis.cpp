#include "gvolt/analysis.hpp"

#include "gvolt/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

namespace gvolt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

/// Fraction of S^{d-1} within geodesic angle phi of a point.
double cap_fraction(int d, double phi) {
    if (d == 2) return phi / std::numbers::pi;
    if (d == 3) return 0.5 * (1.0 - std::cos(phi));
    // integral of sin^{d-2} by composite Simpson
    auto integral = [d](double upper) {
        const int m = 4000;
        const double h = upper / m;
        double s = 0.0;
        for (int k = 0; k <= m; ++k) {
            const double w = (k == 0 || k == m) ? 1.0 : (k % 2 ? 4.0 : 2.0);
            s += w * std::pow(std::sin(k * h), d - 2);
        }
        return s * h / 3.0;
    };
    return integral(phi) / integral(std::numbers::pi);
}

/// Uniform point in the Euclidean ball B(x, r) in R^d.
void sample_in_ball(std::mt19937_64& rng, std::span<const double> x, double r, std::span<double> out) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    const auto d = x.size();
    double norm2 = 0.0;
    do {
        norm2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            out[k] = gauss(rng);
            norm2 += out[k] * out[k];
        }
    } while (norm2 == 0.0);
    const double scale = r * std::pow(unif(rng), 1.0 / static_cast<double>(d)) / std::sqrt(norm2);
    for (std::size_t k = 0; k < d; ++k) out[k] = x[k] + scale * out[k];
}

/// Uniform point on the cap of S^{d-1} within geodesic angle phi of x (|x| = 1).
void sample_in_cap(std::mt19937_64& rng, std::span<const double> x, double phi, std::span<double> out) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    const auto d = x.size();
    // polar angle has density proportional to sin^{d-2}; phi <= pi/2 here
    double theta = 0.0;
    const double sin_max = std::sin(std::min(phi, std::numbers::pi / 2));
    for (;;) {
        theta = phi * unif(rng);
        if (d == 2) break;
        if (unif(rng) <= std::pow(std::sin(theta) / sin_max, static_cast<double>(d) - 2.0)) break;
    }
    // random unit tangent direction at x
    double norm2 = 0.0;
    do {
        double proj = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            out[k] = gauss(rng);
            proj += out[k] * x[k];
        }
        norm2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            out[k] -= proj * x[k];
            norm2 += out[k] * out[k];
        }
    } while (norm2 < 1e-24);
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t k = 0; k < d; ++k) out[k] = std::cos(theta) * x[k] + std::sin(theta) * out[k] * inv;
}

double distance_in(const BoundsGeometry& g, std::span<const double> a, std::span<const double> b) {
    if (g.kind == BoundsGeometry::Kind::sphere) {
        double dot = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
        return std::acos(std::clamp(dot, -1.0, 1.0));
    }
    return euclidean_distance(a, b);
}

double kernel_ball_mass(double r, const BoundsGeometry& g) {
    if (g.kind == BoundsGeometry::Kind::disk)
        return unit_ball_volume(g.dim) * std::pow(r, g.dim) / g.domain_volume;
    return cap_fraction(g.dim, chord_to_angle(std::min(r, 2.0)));
}

}  // namespace

bool satisfies_max_principle(const VoltageFunction& v) {
    for (double x : v.values)
        if (!(x >= 0.0 && x <= 1.0)) return false;
    for (auto i : v.source.mask)
        if (v.values[i] != 1.0) return false;
    return true;
}

double RadialProfile::stderr_of(std::size_t k) const {
    if (bin_count[k] == 0) return kNaN;
    return bin_stddev[k] / std::sqrt(static_cast<double>(bin_count[k]));
}

std::optional<std::size_t> RadialProfile::bin_of(double z) const {
    if (bins() == 0 || z < bin_edges.front() || z > bin_edges.back()) return std::nullopt;
    const auto k = static_cast<std::size_t>((z - bin_edges.front()) / width());
    return std::min(k, bins() - 1);
}

RadialProfile radial_profile(const PointCloud& cloud, std::span<const double> values,
                             std::span<const double> center, std::size_t n_bins,
                             std::optional<double> max_distance) {
    if (n_bins < 2) throw ValidationError("profile.n_bins: must be >= 2");
    if (values.size() != cloud.size()) throw ValidationError("profile: value count differs from sample size");
    if (static_cast<int>(center.size()) != cloud.dim()) throw ValidationError("profile: center dimension mismatch");

    RadialProfile prof;
    prof.geodesic = cloud.manifold.is_spherical();
    std::vector<double> dist(cloud.size());
    std::vector<double> unit_center(center.begin(), center.end());
    if (prof.geodesic) {
        double norm = 0.0;
        for (double c : unit_center) norm += c * c;
        norm = std::sqrt(norm);
        for (double& c : unit_center) c /= norm;
    }
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (prof.geodesic) {
            double dot = 0.0;
            auto x = cloud.row(i);
            for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * unit_center[k];
            dist[i] = std::acos(std::clamp(dot, -1.0, 1.0));
        } else {
            dist[i] = euclidean_distance(cloud.row(i), center);
        }
    }
    double top = max_distance.value_or(dist.empty() ? 1.0 : *std::ranges::max_element(dist));
    if (!(top > 0.0)) top = 1.0;

    prof.bin_edges.resize(n_bins + 1);
    for (std::size_t k = 0; k <= n_bins; ++k) prof.bin_edges[k] = top * static_cast<double>(k) / static_cast<double>(n_bins);
    prof.bin_count.assign(n_bins, 0);
    std::vector<double> sum(n_bins, 0.0), sum_sq(n_bins, 0.0);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        if (dist[i] > top) {
            ++prof.overflow;
            continue;
        }
        const auto k = std::min(n_bins - 1, static_cast<std::size_t>(dist[i] / top * static_cast<double>(n_bins)));
        ++prof.bin_count[k];
        sum[k] += values[i];
        sum_sq[k] += values[i] * values[i];
    }
    prof.bin_mean.assign(n_bins, kNaN);
    prof.bin_stddev.assign(n_bins, kNaN);
    for (std::size_t k = 0; k < n_bins; ++k) {
        const auto c = static_cast<double>(prof.bin_count[k]);
        if (c == 0) continue;
        const double mean = sum[k] / c;
        prof.bin_mean[k] = mean;
        prof.bin_stddev[k] = c > 1 ? std::sqrt(std::max(0.0, (sum_sq[k] - c * mean * mean) / (c - 1))) : 0.0;
    }
    return prof;
}

MonotoneReport check_monotone(const RadialProfile& profile, double slack, double source_radius) {
    MonotoneReport rep;
    std::optional<std::size_t> prev;
    for (std::size_t k = 0; k < profile.bins(); ++k) {
        if (!profile.defined(k) || profile.bin_edges[k] < source_radius) continue;
        if (prev && profile.bin_mean[k] > profile.bin_mean[*prev] + slack) {
            rep.ok = false;
            rep.violations.push_back(*prev);
        }
        prev = k;
    }
    return rep;
}

BoundsGeometry BoundsGeometry::from_manifold(const ManifoldSpec& spec) {
    BoundsGeometry g;
    switch (spec.kind) {
        case ManifoldSpec::Kind::sphere:
            g.kind = Kind::sphere;
            g.dim = spec.dim;
            g.domain_volume = spec.volume();
            return g;
        case ManifoldSpec::Kind::ball:
            g.kind = Kind::disk;
            g.dim = spec.dim;
            g.domain_volume = spec.volume();
            return g;
        case ManifoldSpec::Kind::unit_square:
            g.kind = Kind::disk;
            g.dim = 2;
            g.domain_volume = 1.0;
            return g;
        case ManifoldSpec::Kind::interval:
            g.kind = Kind::disk;
            g.dim = 1;
            g.domain_volume = spec.hi - spec.lo;
            return g;
        default:
            break;
    }
    throw ValidationError("bounds: decay envelopes are defined for spheres and flat domains only");
}

double DecayBounds::upper_envelope(double t) const { return std::exp(-t * upper_rate); }

double DecayBounds::lower_envelope(double t) const { return std::exp(-lower_exponent * t * lower_rate); }

double DecayBounds::lower_envelope_stderr(double t) const {
    // d/dgamma exp(-c t ln((a + rho) / gamma)) = env * c t / gamma
    if (gamma <= 0.0) return 0.0;
    return lower_envelope(t) * lower_exponent * t * gamma_stderr / gamma;
}

DecayBounds theoretical_bounds(double r, double rho, const BoundsGeometry& geometry, double source_radius,
                               std::size_t mc_samples, std::uint64_t seed) {
    if (!(r > 0.0)) throw ValidationError("bounds.r: must be > 0");
    if (!(rho > 0.0)) throw ValidationError("bounds.rho: must be > 0");
    if (mc_samples < 1) throw ValidationError("bounds.mc_samples: must be >= 1");
    const bool sphere = geometry.kind == BoundsGeometry::Kind::sphere;
    if (sphere && r >= std::sqrt(2.0)) throw ValidationError("bounds.r: sphere envelopes need r < sqrt(2)");

    DecayBounds b;
    b.geometry = geometry;
    b.r = r;
    b.rho = rho;
    b.source_radius = source_radius;
    b.a = kernel_ball_mass(r, geometry);
    b.step = sphere ? chord_to_angle(r) : r;
    b.lower_step = sphere ? chord_to_angle(r / 2.0) : r;
    b.lower_exponent = sphere ? 1.0 : 2.0;
    const double half_step = sphere ? chord_to_angle(r / 2.0) : r / 2.0;

    // worst case for gamma: the point sits at distance `step` from the center
    const auto d = static_cast<std::size_t>(geometry.dim);
    std::vector<double> center(d, 0.0), x(d, 0.0), y(d, 0.0);
    if (sphere) {
        center[0] = 1.0;
        x[0] = std::cos(b.step);
        x[1] = std::sin(b.step);
    } else {
        x[0] = b.step;
    }
    const double reach = b.step - half_step;
    std::mt19937_64 rng(seed);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < mc_samples; ++s) {
        if (sphere)
            sample_in_cap(rng, x, b.step, y);
        else
            sample_in_ball(rng, x, r, y);
        if (distance_in(geometry, center, y) <= reach) ++hits;
    }
    const double frac = static_cast<double>(hits) / static_cast<double>(mc_samples);
    b.gamma = b.a * frac;
    b.gamma_stderr = b.a * std::sqrt(frac * (1.0 - frac) / static_cast<double>(mc_samples));

    b.upper_rate = std::log1p(2.0 * rho / b.a);
    b.lower_rate = b.gamma > 0.0 ? std::log((b.a + rho) / b.gamma) : std::numeric_limits<double>::infinity();
    return b;
}

MassEstimate estimate_kernel_mass_mc(double r, const BoundsGeometry& geometry, std::size_t samples,
                                     std::uint64_t seed) {
    if (samples < 1) throw ValidationError("mass estimate: samples must be >= 1");
    const bool sphere = geometry.kind == BoundsGeometry::Kind::sphere;
    const auto d = static_cast<std::size_t>(geometry.dim);
    std::vector<double> center(d, 0.0), y(d, 0.0);
    if (sphere) center[0] = 1.0;
    const double domain_radius = sphere ? 1.0 : std::pow(geometry.domain_volume / unit_ball_volume(geometry.dim), 1.0 / geometry.dim);
    if (!sphere && r >= domain_radius) throw ValidationError("mass estimate: kernel ball leaves the domain");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unif;
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& c : y) {
                c = gauss(rng);
                norm2 += c * c;
            }
        } while (norm2 == 0.0);
        const double scale = (sphere ? 1.0 : domain_radius * std::pow(unif(rng), 1.0 / geometry.dim)) / std::sqrt(norm2);
        for (auto& c : y) c *= scale;
        if (euclidean_distance(center, y) <= r) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

std::vector<EnvelopeRow> compare_envelopes(const RadialProfile& profile, const DecayBounds& bounds, int t_max,
                                           double sigmas) {
    std::vector<EnvelopeRow> rows;
    for (int t = 1; t <= t_max; ++t) {
        EnvelopeRow row;
        row.t = t;
        row.z = t * bounds.step;
        row.upper = bounds.upper_envelope(t);
        row.lower = bounds.lower_envelope(t * bounds.step / bounds.lower_step);
        row.upper_applies = row.z >= 2.0 * bounds.r * (1.0 - 1e-12);
        const auto k = profile.bin_of(row.z);
        if (!k || !profile.defined(*k)) {
            row.h = kNaN;
            row.h_stderr = kNaN;
            row.within = false;
        } else {
            row.h = profile.bin_mean[*k];
            row.h_stderr = profile.stderr_of(*k);
            const double lo = row.lower - sigmas * (row.h_stderr + bounds.lower_envelope_stderr(t * bounds.step / bounds.lower_step));
            const double hi = row.upper + sigmas * row.h_stderr;
            row.within = row.h >= lo && (!row.upper_applies || row.h <= hi);
        }
        rows.push_back(row);
    }
    return rows;
}

SupportReport support_radius(const RadialProfile& profile, double tau, const DecayBounds& bounds) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ValidationError("support.tau: must lie in (0, 1]");
    SupportReport rep;
    rep.tau = tau;
    const double a = bounds.a;
    const double log_inv_tau = std::log(1.0 / tau);
    rep.r_l = (bounds.r / 2.0) * log_inv_tau / std::log((a + bounds.rho) / bounds.gamma);
    rep.r_u = bounds.r * log_inv_tau / std::log1p(bounds.rho / a);

    std::optional<double> best;
    for (std::size_t k = 0; k < profile.bins(); ++k) {
        if (!profile.defined(k) || profile.bin_edges[k] < bounds.source_radius) continue;
        if (profile.bin_mean[k] >= tau) best = profile.center(k);
    }
    if (best) {
        rep.r_supp_empirical = *best;
    } else {
        rep.r_supp_empirical = bounds.source_radius;
        rep.degenerate = true;
    }
    return rep;
}

const ConvergenceCell& ConvergenceReport::cell(std::size_t seed_index, std::size_t n_index) const {
    const std::size_t per_seed = pairs.size() + 1;
    return cells.at(seed_index * per_seed + n_index);
}

ConvergenceReport convergence_study(const ConvergenceSpec& spec) {
    spec.manifold.validate();
    spec.kernel.validate();
    spec.solver.validate();
    if (spec.n_list.empty()) throw ValidationError("convergence.n_list: must not be empty");
    for (std::size_t k = 1; k < spec.n_list.size(); ++k)
        if (spec.n_list[k] <= spec.n_list[k - 1]) throw ValidationError("convergence.n_list: must be increasing");
    if (spec.seeds.empty()) throw ValidationError("convergence.seeds: must not be empty");
    if (spec.eval_grid.cols() != spec.manifold.ambient_dim())
        throw ValidationError("convergence.eval_grid: dimension mismatch");

    const std::size_t n_count = spec.n_list.size();
    ConvergenceReport rep;
    rep.cells.resize(spec.seeds.size() * n_count);
    for (std::size_t s = 0; s < spec.seeds.size(); ++s)
        for (std::size_t k = 0; k < n_count; ++k) {
            rep.cells[s * n_count + k].n = spec.n_list[k];
            rep.cells[s * n_count + k].seed = spec.seeds[s];
        }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= rep.cells.size()) return;
            auto& cell = rep.cells[idx];
            try {
                auto cloud = std::make_shared<const PointCloud>(sample_manifold(spec.manifold, cell.n, cell.seed));
                const auto graph = build_grounded_graph(cloud, spec.kernel, spec.rho_g);
                const auto source = select_source(*cloud, std::span<const double>(spec.source_center.data(), static_cast<std::size_t>(spec.source_center.size())), spec.source_radius);
                auto [v, report] = solve(graph, source, spec.solver);
                if (!report.converged) throw NumericalError("solver did not converge");
                cell.iterations = report.iterations;
                cell.max_principle = satisfies_max_principle(v);
                cell.values = extend_voltage(graph, v, spec.eval_grid);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = rep.cells.size();
                return;
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(rep.cells.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t k = 0; k + 1 < n_count; ++k) {
        ConvergencePair pair;
        pair.n_from = spec.n_list[k];
        pair.n_to = spec.n_list[k + 1];
        for (std::size_t s = 0; s < spec.seeds.size(); ++s) {
            const auto& a = rep.cells[s * n_count + k].values;
            const auto& b = rep.cells[s * n_count + k + 1].values;
            double sup = 0.0, total = 0.0;
            std::size_t used = 0, excluded = 0;
            for (std::size_t g = 0; g < a.size(); ++g) {
                if (!a[g] || !b[g]) {
                    ++excluded;
                    continue;
                }
                const double diff = std::abs(*a[g] - *b[g]);
                sup = std::max(sup, diff);
                total += diff;
                ++used;
            }
            pair.sup_diff.push_back(sup);
            pair.mean_diff.push_back(used ? total / static_cast<double>(used) : kNaN);
            pair.excluded.push_back(excluded);
        }
        pair.median_sup = median(pair.sup_diff);
        pair.median_mean = median(pair.mean_diff);
        rep.pairs.push_back(std::move(pair));
    }
    return rep;
}

RowMatrix line_grid(double lo, double hi, std::size_t count) {
    if (count < 1) throw ValidationError("grid: count must be >= 1");
    RowMatrix g(static_cast<Eigen::Index>(count), 1);
    for (std::size_t k = 0; k < count; ++k)
        g(static_cast<Eigen::Index>(k), 0) = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1);
    return g;
}

RowMatrix square_grid(std::size_t k) {
    if (k < 1) throw ValidationError("grid: size must be >= 1");
    RowMatrix g(static_cast<Eigen::Index>(k * k), 2);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            const auto row = static_cast<Eigen::Index>(i * k + j);
            g(row, 0) = (static_cast<double>(i) + 0.5) / static_cast<double>(k);
            g(row, 1) = (static_cast<double>(j) + 0.5) / static_cast<double>(k);
        }
    return g;
}

double median(std::vector<double> values) {
    std::erase_if(values, [](double v) { return std::isnan(v); });
    if (values.empty()) return kNaN;
    std::ranges::sort(values);
    const std::size_t m = values.size() / 2;
    return values.size() % 2 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

}  // namespace gvolt
