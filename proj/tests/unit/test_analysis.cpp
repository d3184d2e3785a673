#include "gvolt/analysis.hpp"
#include "gvolt/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace gvolt;

TEST_CASE("profile of constants and indicators") {
    const auto c = sample_manifold(ManifoldSpec::unit_square(), 2000, 1);
    const double center[2] = {0.5, 0.5};
    std::vector<double> ones(c.size(), 1.0);
    const auto p = radial_profile(c, ones, center, 10);
    std::size_t total = 0;
    for (std::size_t k = 0; k < p.bins(); ++k) {
        total += p.bin_count[k];
        if (p.defined(k)) CHECK(p.bin_mean[k] == 1.0);
        else CHECK(std::isnan(p.bin_mean[k]));
    }
    CHECK(total == c.size());

    std::vector<double> ind(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) ind[i] = euclidean_distance(c.row(i), center) <= 0.2 ? 1.0 : 0.0;
    const auto r = radial_profile(c, ind, center, 8, 0.8);  // edges every 0.1
    CHECK(r.bin_mean[0] == 1.0);
    CHECK(r.bin_mean[1] == 1.0);
    for (std::size_t k = 2; k < r.bins(); ++k)
        if (r.defined(k)) CHECK(r.bin_mean[k] == 0.0);
    CHECK_THROWS_AS(radial_profile(c, ind, center, 1), ValidationError);
}

TEST_CASE("monotonicity check") {
    RadialProfile p;
    p.bin_edges = {0, 1, 2, 3, 4};
    p.bin_count = {5, 5, 5, 5};
    p.bin_stddev = {0, 0, 0, 0};
    p.bin_mean = {1.0, 0.5, 0.25, 0.1};
    CHECK(check_monotone(p, 0.0, 0.0).ok);
    p.bin_mean = {0.3, 0.3, 0.3, 0.3};
    CHECK(check_monotone(p, 0.0, 0.0).ok);
    p.bin_mean = {1.0, 0.5, 0.6, 0.1};
    CHECK(!check_monotone(p, 0.0, 0.0).ok);
    CHECK(check_monotone(p, 0.2, 0.0).ok);
}

TEST_CASE("envelope arithmetic at rho = a") {
    const auto geom = BoundsGeometry::from_manifold(ManifoldSpec::unit_volume_ball(2));
    const double r = 0.05, a = std::numbers::pi * r * r;
    const auto b = theoretical_bounds(r, a, geom, r, 200000, 1);
    CHECK(b.a == doctest::Approx(a).epsilon(1e-12));
    for (int t = 1; t <= 5; ++t) CHECK(b.upper_envelope(t) == doctest::Approx(std::pow(3.0, -t)).epsilon(1e-12));
    CHECK(b.gamma > 0.0);
    CHECK(b.gamma <= b.a);
    CHECK(b.lower_exponent == 2.0);

    const auto s = theoretical_bounds(0.2, 0.01, BoundsGeometry::from_manifold(ManifoldSpec::sphere(3)), 0.2, 200000, 1);
    CHECK(s.a == doctest::Approx(0.04 / 4.0).epsilon(1e-12));  // cap fraction (1 - cos phi) / 2 = r^2 / 4
    CHECK(s.gamma <= s.a);
    CHECK(s.step == doctest::Approx(chord_to_angle(0.2)));
}

TEST_CASE("Monte Carlo kernel mass agrees with the closed form") {
    const auto geom = BoundsGeometry::from_manifold(ManifoldSpec::unit_volume_ball(2));
    const auto est = estimate_kernel_mass_mc(0.05, geom, 1000000, 3);
    CHECK(std::abs(est.value - std::numbers::pi * 0.0025) <= 3.0 * est.stderr_value);
    const auto sg = BoundsGeometry::from_manifold(ManifoldSpec::sphere(3));
    const auto es = estimate_kernel_mass_mc(0.3, sg, 1000000, 4);
    CHECK(std::abs(es.value - 0.09 / 4.0) <= 3.0 * es.stderr_value);
}

TEST_CASE("support radius bounds") {
    const auto geom = BoundsGeometry::from_manifold(ManifoldSpec::unit_volume_ball(2));
    const double r = 0.05, a = std::numbers::pi * r * r;
    const auto b = theoretical_bounds(r, a, geom, r, 100000, 1);
    RadialProfile p;
    p.bin_edges = {0.0, 0.05, 0.1, 0.15};
    p.bin_count = {3, 3, 3};
    p.bin_mean = {1.0, 0.3, 0.001};
    p.bin_stddev = {0, 0, 0};
    const auto s = support_radius(p, 0.01, b);
    CHECK(s.r_u == doctest::Approx(0.05 * std::log(100.0) / std::log(2.0)).epsilon(1e-12));
    CHECK(s.r_u == doctest::Approx(0.3322).epsilon(1e-3));
    CHECK(s.r_l <= s.r_u);
    CHECK(s.r_supp_empirical == doctest::Approx(0.075));
    const auto one = support_radius(p, 1.0, b);
    CHECK(one.degenerate);
    CHECK(one.r_supp_empirical == r);
}

TEST_CASE("solved sphere profiles are radially symmetric across seeds") {
    auto profile = [](std::uint64_t seed) {
        auto cloud = std::make_shared<const PointCloud>(sample_manifold(ManifoldSpec::sphere(3), 4096, seed));
        const auto g = build_grounded_graph(cloud, KernelSpec::radial(0.2), 0.01);
        const double e3[3] = {0, 0, 1};
        auto [v, rep] = solve(g, select_source(*cloud, e3, 0.2), SolverConfig{});
        return radial_profile(*cloud, v.values, e3, 30, std::numbers::pi);
    };
    const auto a = profile(11), b = profile(12);
    std::size_t agree = 0, both = 0;
    for (std::size_t k = 0; k < a.bins(); ++k) {
        if (a.bin_count[k] < 2 || b.bin_count[k] < 2) continue;
        ++both;
        const double pooled = std::sqrt(a.stderr_of(k) * a.stderr_of(k) + b.stderr_of(k) * b.stderr_of(k));
        agree += std::abs(a.bin_mean[k] - b.bin_mean[k]) <= 3.0 * pooled + 1e-15;
    }
    CHECK(static_cast<double>(agree) >= 0.95 * static_cast<double>(both));
}

TEST_CASE("convergence study with a single n has no differences") {
    ConvergenceSpec s;
    s.manifold = ManifoldSpec::interval(0, 3);
    s.kernel = KernelSpec::radial(0.05);
    s.rho_g = 0.01;
    s.source_center = Vector::Constant(1, 2.5);
    s.source_radius = 0.5;
    s.n_list = {1024};
    s.eval_grid = line_grid(0, 3, 50);
    s.seeds = {1};
    const auto rep = convergence_study(s);
    CHECK(rep.cells.size() == 1);
    CHECK(rep.pairs.empty());
    CHECK(rep.cells[0].values.size() == 50);
    CHECK(rep.cells[0].max_principle);
    s.n_list = {1024, 512};
    CHECK_THROWS_AS(convergence_study(s), ValidationError);
}

TEST_CASE("median") {
    CHECK(median({3, 1, 2}) == 2.0);
    CHECK(median({4, 1, 2, 3}) == 2.5);
    CHECK(std::isnan(median({})));
}
