#include "gvolt/errors.hpp"
#include "gvolt/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace gvolt;

namespace {

GroundedGraph two_node() {
    const Edge e[] = {{0, 1, 0.5}};  // k = 1, n = 2
    return GroundedGraph::from_edges(2, e, 1.0);
}

GroundedGraph path3() {
    const Edge e[] = {{0, 1, 1.0 / 3.0}, {1, 2, 1.0 / 3.0}};  // k = 1, n = 3
    return GroundedGraph::from_edges(3, e, 1.0);
}

SolverConfig mode(SolverConfig::Mode m, double tau = 0.01, double tol = 1e-10) {
    SolverConfig c;
    c.mode = m;
    c.tau = tau;
    c.tol = tol;
    return c;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("two-node fixture: v = 1/3") {
    const auto g = two_node();
    const auto src = source_from_nodes(2, {0});
    for (auto m : {SolverConfig::Mode::full_power, SolverConfig::Mode::direct_oracle}) {
        auto [v, rep] = solve(g, src, mode(m));
        CHECK(v.values[0] == 1.0);
        CHECK(std::abs(v.values[1] - 1.0 / 3.0) <= 1e-12);
    }
}

TEST_CASE("path fixture: 4/19 and 1/19") {
    const auto g = path3();
    const auto src = source_from_nodes(3, {0});
    // the power method's error is about tol * q / (1 - q), so 1e-12 needs a tighter tol
    for (auto m : {SolverConfig::Mode::full_power, SolverConfig::Mode::direct_oracle}) {
        auto [v, rep] = solve(g, src, mode(m, 0.01, 1e-14));
        CHECK(v.values[0] == 1.0);
        CHECK(std::abs(v.values[1] - 4.0 / 19.0) <= 1e-12);
        CHECK(std::abs(v.values[2] - 1.0 / 19.0) <= 1e-12);
    }
    auto [loc, rep] = solve(g, src, mode(SolverConfig::Mode::localized, 1e-12));
    CHECK(std::abs(loc.values[1] - 4.0 / 19.0) <= 1e-10);
    CHECK(std::abs(loc.values[2] - 1.0 / 19.0) <= 1e-10);
}

TEST_CASE("power method agrees with the direct solve and certifies contraction") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto cloud = std::make_shared<const PointCloud>(sample_manifold(ManifoldSpec::unit_square(), 300, seed));
        const auto g = build_grounded_graph(cloud, KernelSpec::radial(0.12), 0.05 * static_cast<double>(seed));
        const auto src = select_source(*cloud, cloud->row(0), 0.1);
        auto [v, rep] = solve_grounded_emv(g, src);
        const auto d = solve_direct_oracle(g, src);
        CHECK(linf(v.values, d.values) <= 1e-9);
        CHECK(rep.converged);
        CHECK(rep.final_residual <= 1e-10);
        CHECK(rep.contraction_ratio_observed <= rep.contraction_bound);
        CHECK(rep.contraction_bound < 1.0);
        const double bound = std::log(1e10) / std::log1p(g.rho() / g.max_degree()) + 2.0;
        CHECK(static_cast<double>(rep.iterations) <= bound);
        CHECK(fixed_point_residual(g, src, v.values) <= 1e-10);
        for (double x : v.values) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        for (auto i : src.mask) CHECK(v.values[i] == 1.0);
    }
}

TEST_CASE("ungrounded solves") {
    const auto g = path3().with_rho(0.0);
    auto [v, rep] = solve(g, source_from_nodes(3, {0}), SolverConfig{});
    CHECK(v.values == std::vector<double>{1.0, 1.0, 1.0});
    CHECK(!rep.warnings.empty());

    const Edge e[] = {{0, 1, 1.0}, {2, 3, 1.0}};
    const auto split = GroundedGraph::from_edges(4, e, 0.0);
    CHECK_THROWS_AS(solve(split, source_from_nodes(4, {0}), SolverConfig{}), IllPosedError);
}

TEST_CASE("isolated nodes sit at zero") {
    const Edge e[] = {{0, 1, 0.5}};
    const auto g = GroundedGraph::from_edges(3, e, 1.0);
    auto [v, rep] = solve(g, source_from_nodes(3, {0}), SolverConfig{});
    CHECK(v.values[2] == 0.0);
}

TEST_CASE("empty source and bad configs") {
    CHECK_THROWS_AS(source_from_nodes(3, {}), ValidationError);
    SolverConfig c;
    c.tol = 0.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = SolverConfig{};
    c.mode = SolverConfig::Mode::localized;
    c.tau = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("direct oracle refuses large graphs") {
    auto cloud = std::make_shared<const PointCloud>(sample_manifold(ManifoldSpec::interval(0, 1), 5001, 1));
    const auto g = build_grounded_graph(cloud, KernelSpec::radial(0.001), 1.0);
    CHECK_THROWS_WITH_AS(solve_direct_oracle(g, source_from_nodes(5001, {0})), doctest::Contains("iterative"),
                         NumericalError);
}

TEST_CASE("localized solve") {
    auto cloud = std::make_shared<const PointCloud>(sample_manifold(ManifoldSpec::unit_square(), 2000, 3));
    const auto g = build_grounded_graph(cloud, KernelSpec::radial(0.05), 0.01);
    const double c[2] = {0.5, 0.5};
    const auto src = select_source(*cloud, c, 0.05);
    auto [full, r1] = solve_grounded_emv(g, src);

    SUBCASE("tau above every free value keeps only the source") {
        double top = 0.0;
        for (std::size_t i = 0; i < full.values.size(); ++i)
            if (!std::ranges::binary_search(src.mask, i)) top = std::max(top, full.values[i]);
        auto [loc, r2] = solve_localized(g, src, mode(SolverConfig::Mode::localized, std::min(0.999, top + 1e-3)));
        REQUIRE(loc.support);
        CHECK(*loc.support == src.mask);
    }
    SUBCASE("tiny tau reproduces the full solve") {
        auto [loc, r2] = solve_localized(g, src, mode(SolverConfig::Mode::localized, 1e-300));
        CHECK(linf(loc.values, full.values) <= 1e-10);
    }
    SUBCASE("values agree on the support within tau + tol") {
        const double tau = 0.01;
        auto [loc, r2] = solve_localized(g, src, mode(SolverConfig::Mode::localized, tau));
        REQUIRE(loc.support);
        for (auto i : *loc.support) CHECK(std::abs(loc.values[i] - full.values[i]) <= tau + 1e-10);
        for (double x : loc.values) CHECK(x <= 1.0);
    }
}

TEST_CASE("extension") {
    PointCloud pc;
    pc.points.resize(3, 1);
    pc.points << 0.0, 0.03, 0.2;
    pc.manifold = ManifoldSpec::external(1);
    auto cloud = std::make_shared<const PointCloud>(pc);
    const auto g = build_grounded_graph(cloud, KernelSpec::radial(0.05), 1.0);
    VoltageFunction v;
    v.values = {0.2, 0.4, 0.9};
    v.source = source_from_nodes(3, {2});

    RowMatrix q(3, 1);
    q << 0.03, 0.015, 1.0;
    const auto out = extend_voltage(g, v, q);
    CHECK(*out[0] == doctest::Approx(0.2));  // node 1 itself skipped, neighbor 0 remains
    CHECK(*out[1] == doctest::Approx(0.3));  // equal weights
    CHECK(!out[2]);                          // no kernel mass

    v.source = select_source(*cloud, cloud->row(2), 0.01);
    RowMatrix inside(1, 1);
    inside << 0.205;
    CHECK(*extend_voltage(g, v, inside)[0] == 1.0);
}
