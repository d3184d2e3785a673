#include "gvolt/er.hpp"
#include "gvolt/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace gvolt;

namespace {

SourceSinkSpec nodes_spec(std::size_t n, std::size_t s, std::size_t g, BaselineMethod m) {
    SourceSinkSpec spec;
    spec.source = source_from_nodes(n, {s});
    spec.sink = source_from_nodes(n, {g});
    spec.source_node = s;
    spec.sink_node = g;
    spec.mode = m;
    return spec;
}

GroundedGraph random_connected(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> w(0.5, 2.0);
    std::vector<Edge> e;
    for (std::size_t i = 1; i < n; ++i) e.push_back({static_cast<std::uint32_t>(rng() % i), static_cast<std::uint32_t>(i), w(rng)});
    for (std::size_t k = 0; k < n; ++k) {
        const auto a = static_cast<std::uint32_t>(rng() % n), b = static_cast<std::uint32_t>(rng() % n);
        if (a == b) continue;
        bool dup = false;
        for (const auto& x : e) dup = dup || (x.i == a && x.j == b) || (x.i == b && x.j == a);
        if (!dup) e.push_back({a, b, w(rng)});
    }
    return GroundedGraph::from_edges(n, e, 0.0);
}

}  // namespace

TEST_CASE("power method on short paths") {
    const Edge p3[] = {{0, 1, 1.0}, {1, 2, 1.0}};
    auto [v3, r3] = solve_pm(GroundedGraph::from_edges(3, p3, 5.0), nodes_spec(3, 0, 2, BaselineMethod::pm));
    CHECK(v3.values[0] == 1.0);
    CHECK(v3.values[2] == 0.0);
    CHECK(std::abs(v3.values[1] - 0.5) <= 1e-9);

    const Edge p4[] = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}};
    auto [v4, r4] = solve_pm(GroundedGraph::from_edges(4, p4, 0.0), nodes_spec(4, 0, 3, BaselineMethod::pm));
    CHECK(std::abs(v4.values[1] - 2.0 / 3.0) <= 1e-9);
    CHECK(std::abs(v4.values[2] - 1.0 / 3.0) <= 1e-9);
}

TEST_CASE("power method flags floating components") {
    const Edge e[] = {{0, 1, 1.0}, {1, 2, 1.0}, {3, 4, 1.0}};
    auto [v, rep] = solve_pm(GroundedGraph::from_edges(5, e, 0.0), nodes_spec(5, 0, 2, BaselineMethod::pm));
    CHECK(v.values[3] == 0.0);
    CHECK(v.values[4] == 0.0);
    CHECK(!rep.warnings.empty());
}

TEST_CASE("laplacian solve") {
    const Edge e[] = {{0, 1, 4.0}};
    const auto g = GroundedGraph::from_edges(2, e, 0.0);
    const double zero[] = {0.0, 0.0};
    CHECK(laplacian_solve(g, zero).x == std::vector<double>{0.0, 0.0});
    const double rhs[] = {1.0, -1.0};
    const auto x = laplacian_solve(g, rhs).x;
    CHECK(x[0] == doctest::Approx(1.0 / 8.0).epsilon(1e-9));
    CHECK(x[1] == doctest::Approx(-1.0 / 8.0).epsilon(1e-9));
    const double skewed[] = {1.0, 0.0};
    CHECK_THROWS_AS(laplacian_solve(g, skewed), ValidationError);

    const auto big = random_connected(200, 3);
    std::vector<double> b(200, 0.0);
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    double mean = 0.0;
    for (auto& x : b) mean += (x = gauss(rng));
    for (auto& x : b) x -= mean / 200.0;
    const auto res = laplacian_solve(big, b);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        double lx = big.degree(i) * res.x[i];
        const auto nb = big.neighbors(i);
        const auto w = big.weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k) lx -= w[k] * res.x[nb[k]];
        num += (lx - b[i]) * (lx - b[i]);
        den += b[i] * b[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-8);
}

TEST_CASE("point ER on a single resistor") {
    const double w = 2.5;
    const Edge e[] = {{0, 1, w}};
    const auto g = GroundedGraph::from_edges(2, e, 0.0);
    const auto v = er_voltage(g, nodes_spec(2, 0, 1, BaselineMethod::point_er)).x;
    CHECK(v[0] == doctest::Approx(1.0 / (2.0 * w)).epsilon(1e-9));
    CHECK(v[1] == doctest::Approx(-1.0 / (2.0 * w)).epsilon(1e-9));
    CHECK(effective_resistance(g, 0, 1) == doctest::Approx(1.0 / w).epsilon(1e-9));
    CHECK(effective_resistance(g, 1, 1) == 0.0);
}

TEST_CASE("region ER with coinciding regions is zero") {
    const auto g = random_connected(30, 1);
    SourceSinkSpec spec;
    spec.source = source_from_nodes(30, {3, 4, 5});
    spec.sink = spec.source;
    spec.mode = BaselineMethod::region_er;
    const auto rhs = er_rhs(30, spec);
    for (double x : rhs) CHECK(x == 0.0);
    for (double x : er_voltage(g, spec).x) CHECK(x == 0.0);
}

TEST_CASE("region and density right-hand sides are mean zero") {
    SourceSinkSpec spec;
    spec.source = source_from_nodes(20, {0, 1, 2});
    spec.sink = source_from_nodes(20, {10});
    spec.source_node = 1;
    spec.sink_node = 10;
    for (auto m : {BaselineMethod::region_er, BaselineMethod::density_er, BaselineMethod::point_er}) {
        spec.mode = m;
        double s = 0.0;
        for (double x : er_rhs(20, spec)) s += x;
        CHECK(std::abs(s) <= 1e-12);
    }
}

TEST_CASE("effective resistance oracles") {
    const Edge tri[] = {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
    CHECK(effective_resistance(GroundedGraph::from_edges(3, tri, 0.0), 0, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));

    // two clusters of m nodes joined by m^2 unit resistors; stiff intra-cluster
    // springs make each cluster a super-node, so R -> 1/m^2
    const std::size_t m = 4;
    std::vector<Edge> e;
    const double stiff = 1e7;
    for (std::uint32_t a = 0; a < 2 * m; ++a)
        for (std::uint32_t b = a + 1; b < 2 * m; ++b) {
            const bool same = (a < m) == (b < m);
            e.push_back({a, b, same ? stiff : 1.0});
        }
    const auto g = GroundedGraph::from_edges(2 * m, e, 0.0);
    CHECK(effective_resistance(g, 0, m) == doctest::Approx(1.0 / (m * m)).epsilon(1e-5));
}

TEST_CASE("effective resistance is a symmetric metric on small graphs") {
    const auto g = random_connected(25, 7);
    std::vector<std::vector<double>> R(25, std::vector<double>(25));
    for (std::size_t i = 0; i < 25; ++i)
        for (std::size_t j = 0; j < 25; ++j) R[i][j] = effective_resistance(g, i, j);
    for (std::size_t i = 0; i < 25; ++i)
        for (std::size_t j = 0; j < 25; ++j) {
            CHECK(std::abs(R[i][j] - R[j][i]) <= 1e-10);
            for (std::size_t k = 0; k < 25; ++k) CHECK(R[i][k] <= R[i][j] + R[j][k] + 1e-9);
        }
}

TEST_CASE("source and sink must be disjoint and nonempty") {
    const auto c = sample_manifold(ManifoldSpec::unit_square(), 500, 1);
    const double s[2] = {0.1, 0.1}, g[2] = {0.15, 0.15}, far[2] = {5, 5};
    CHECK_THROWS_AS(make_source_sink(c, s, 0.1, g, 0.1, BaselineMethod::pm), ValidationError);
    CHECK_THROWS_AS(make_source_sink(c, s, 0.1, far, 0.1, BaselineMethod::pm), ValidationError);
    CHECK_THROWS_AS(make_source_sink(c, far, 0.1, s, 0.1, BaselineMethod::pm), EmptySourceError);
    const double g2[2] = {0.7, 0.7};
    const auto spec = make_source_sink(c, s, 0.1, g2, 0.1, BaselineMethod::point_er);
    CHECK(std::ranges::binary_search(spec.source.mask, spec.source_node));
    CHECK(std::ranges::binary_search(spec.sink.mask, spec.sink_node));
}
