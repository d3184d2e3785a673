#include "gvolt/errors.hpp"
#include "gvolt/graph.hpp"

#include <doctest.h>

#include <cmath>

using namespace gvolt;

namespace {

PointCloud cloud_of(std::initializer_list<std::initializer_list<double>> rows) {
    PointCloud c;
    c.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
        Eigen::Index k = 0;
        for (double x : r) c.points(i, k++) = x;
        ++i;
    }
    c.manifold = ManifoldSpec::external(static_cast<int>(c.points.cols()));
    return c;
}

}  // namespace

TEST_CASE("two close points give one edge of weight 1/2") {
    const auto g = build_grounded_graph(cloud_of({{0.0}, {0.01}}), KernelSpec::radial(0.05), 1.0);
    CHECK(g.edge_count() == 1);
    CHECK(g.weights(0)[0] == 0.5);
    CHECK(g.degree(0) == 0.5);
    CHECK(g.degree(1) == 0.5);
    CHECK(g.rho() == 1.0);
}

TEST_CASE("collinear points beyond r are not joined") {
    const auto g = build_grounded_graph(cloud_of({{0.0}, {0.04}, {0.08}}), KernelSpec::radial(0.05), 1.0);
    const auto e = g.edges();
    REQUIRE(e.size() == 2);
    CHECK(e[0].i == 0);
    CHECK(e[0].j == 1);
    CHECK(e[1].i == 1);
    CHECK(e[1].j == 2);
    CHECK(e[0].weight == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("grid search matches brute force") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto c = sample_manifold(ManifoldSpec::unit_square(), 1000, seed);
        const auto g = build_grounded_graph(c, KernelSpec::radial(0.05), 1.0);
        std::size_t brute = 0;
        for (std::size_t i = 0; i < c.size(); ++i)
            for (std::size_t j = i + 1; j < c.size(); ++j) brute += euclidean_distance(c.row(i), c.row(j)) <= 0.05;
        CHECK(g.edge_count() == brute);
    }
    const auto s = sample_manifold(ManifoldSpec::sphere(3), 800, 5);
    const auto gs = build_grounded_graph(s, KernelSpec::radial(0.2), 1.0);
    std::size_t brute = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) brute += euclidean_distance(s.row(i), s.row(j)) <= 0.2;
    CHECK(gs.edge_count() == brute);
}

TEST_CASE("adjacency is symmetric and degrees are row sums") {
    const auto c = sample_manifold(ManifoldSpec::unit_square(), 500, 9);
    const auto g = build_grounded_graph(c, KernelSpec::gaussian(0.03), 0.5);
    for (std::size_t i = 0; i < g.size(); ++i) {
        double sum = 0.0;
        const auto nb = g.neighbors(i);
        const auto w = g.weights(i);
        for (std::size_t k = 0; k < nb.size(); ++k) {
            CHECK(nb[k] != i);
            CHECK(w[k] > 0.0);
            sum += w[k];
            const auto back = g.neighbors(nb[k]);
            const auto it = std::ranges::find(back, static_cast<std::uint32_t>(i));
            REQUIRE(it != back.end());
            CHECK(g.weights(nb[k])[static_cast<std::size_t>(it - back.begin())] == w[k]);
        }
        CHECK(std::abs(sum - g.degree(i)) <= 1e-12 * std::max(1.0, sum));
    }
}

TEST_CASE("mean degree concentrates as n doubles") {
    auto mean_degree = [](std::size_t n) {
        return build_grounded_graph(sample_manifold(ManifoldSpec::interval(0, 3), n, 4), KernelSpec::radial(0.05), 1.0)
            .mean_degree();
    };
    const double d1 = mean_degree(1000), d2 = mean_degree(2000), d3 = mean_degree(4000), d4 = mean_degree(8000);
    // the integral of the kernel is 0.1/3 away from the ends
    CHECK(std::abs(d4 - 0.1 / 3.0) < 0.002);
    CHECK(std::abs(d4 - d3) < std::abs(d2 - d1) + 1e-3);
}

TEST_CASE("source selection") {
    const auto c = sample_manifold(ManifoldSpec::interval(0, 3), 300, 1);
    const double center[1] = {2.5};
    const auto s = select_source(c, center, 0.5);
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c.points(i, 0) >= 2.0) expected.push_back(i);
    CHECK(s.mask == expected);

    const auto self = select_source(c, c.row(17), 0.0);
    CHECK(self.mask == std::vector<std::size_t>{17});

    const double far[1] = {10.0};
    CHECK_THROWS_AS(select_source(c, far, 0.1), EmptySourceError);
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(build_grounded_graph(cloud_of({{0.0}}), KernelSpec::radial(0.1), 1.0), ValidationError);
    CHECK_THROWS_AS(build_grounded_graph(cloud_of({{0.0}, {1.0}}), KernelSpec::radial(0.1), -1.0), ValidationError);
    const Edge loop[] = {{0, 0, 1.0}};
    CHECK_THROWS_AS(GroundedGraph::from_edges(2, loop, 1.0), ValidationError);
    const Edge dup[] = {{0, 1, 1.0}, {1, 0, 1.0}};
    CHECK_THROWS_AS(GroundedGraph::from_edges(2, dup, 1.0), ValidationError);
    const Edge zero[] = {{0, 1, 0.0}};
    CHECK_THROWS_AS(GroundedGraph::from_edges(2, zero, 1.0), ValidationError);
}

TEST_CASE("components") {
    const Edge e[] = {{0, 1, 1.0}, {2, 3, 1.0}};
    const auto g = GroundedGraph::from_edges(5, e, 1.0);
    CHECK(!g.is_connected());
    CHECK(g.component_labels() == std::vector<std::uint32_t>{0, 0, 1, 1, 2});
}
