#include "gvolt/errors.hpp"
#include "gvolt/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

using namespace gvolt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "gvolt_unit_io";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("doubles round-trip through text") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 1000; ++i) {
        const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        CHECK(std::stod(io::format_double(x)) == x);
    }
}

TEST_CASE("matrix CSV round-trip") {
    RowMatrix m = RowMatrix::Random(7, 3);
    const auto p = scratch("m.csv");
    io::write_matrix_csv(p, m);
    CHECK(io::read_matrix_csv(p) == m);
    CHECK(!fs::exists(p.string() + ".tmp"));
}

TEST_CASE("malformed CSV reports the line") {
    const auto p = scratch("bad.csv");
    io::write_text_atomic(p, "# comment\n1,2\n3,oops\n");
    CHECK_THROWS_WITH_AS(io::read_csv(p), doctest::Contains("bad.csv:3"), ValidationError);
    io::write_text_atomic(p, "1,2\n3\n");
    CHECK_THROWS_AS(io::read_matrix_csv(p), ValidationError);
    CHECK_THROWS_AS(io::read_csv(scratch("missing.csv")), ValidationError);
}

TEST_CASE("voltage and edge files") {
    const auto vp = scratch("v.csv");
    io::write_voltage_csv(vp, {1.0, 1.0 / 3.0});
    CHECK(io::read_text(vp) == "0,1\n1,0.33333333333333331\n");
    CHECK(io::read_voltage_csv(vp) == std::vector<double>{1.0, 1.0 / 3.0});

    const Edge e[] = {{0, 1, 0.25}, {1, 2, 0.5}};
    const auto g = GroundedGraph::from_edges(3, e, 1.0);
    const auto ep = scratch("e.csv");
    io::write_edge_csv(ep, g);
    const auto back = io::read_edge_csv(ep);
    REQUIRE(back.size() == 2);
    CHECK(back[1].i == 1);
    CHECK(back[1].j == 2);
    CHECK(back[1].weight == 0.5);
    io::write_text_atomic(ep, "0,1.5,1\n");
    CHECK_THROWS_AS(io::read_edge_csv(ep), ValidationError);
}
