#include "gvolt/analysis.hpp"
#include "gvolt/embedding.hpp"
#include "gvolt/er.hpp"
#include "gvolt/errors.hpp"
#include "gvolt/graph.hpp"
#include "gvolt/manifold.hpp"
#include "gvolt/solver.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

namespace py = pybind11;
using namespace gvolt;

namespace {

py::dict report_dict(const SolveReport& r) {
    py::dict d;
    d["iterations"] = r.iterations;
    d["final_residual"] = r.final_residual;
    d["contraction_ratio_observed"] = r.contraction_ratio_observed;
    d["contraction_bound"] = r.contraction_bound;
    d["wall_time"] = r.wall_time;
    d["converged"] = r.converged;
    d["warnings"] = r.warnings;
    return d;
}

SourceRegion region(const GroundedGraph& g, const std::optional<std::vector<double>>& center, double radius,
                    const std::optional<std::vector<std::size_t>>& nodes) {
    if (nodes) return source_from_nodes(g.size(), *nodes);
    if (!center) throw ValidationError("source: give either center or nodes");
    if (!g.cloud()) throw ValidationError("source.center: graph has no coordinates");
    if (static_cast<int>(center->size()) != g.cloud()->dim())
        throw ValidationError("source.center: expected " + std::to_string(g.cloud()->dim()) + " coordinates");
    return select_source(*g.cloud(), *center, radius);
}

std::shared_ptr<const PointCloud> cloud_from(const RowMatrix& points, std::optional<ManifoldSpec> manifold) {
    PointCloud c;
    c.points = points;
    c.manifold = manifold.value_or(ManifoldSpec::external(static_cast<int>(points.cols())));
    return std::make_shared<const PointCloud>(std::move(c));
}

SolverConfig solver_config(const std::string& mode, double tol, std::size_t max_iters, double tau) {
    SolverConfig cfg;
    cfg.mode = solver_mode_from_string(mode);
    cfg.tol = tol;
    cfg.max_iters = max_iters;
    cfg.tau = tau;
    cfg.validate();
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_gvolt, m) {
    m.doc() = "Grounded metric voltage functions on sampled manifolds";

    auto validation = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    auto numerical = py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
    py::register_exception<EmptySourceError>(m, "EmptySourceError", validation.ptr());
    py::register_exception<IllPosedError>(m, "IllPosedError", numerical.ptr());

    py::class_<ManifoldSpec>(m, "Manifold")
        .def_static("interval", &ManifoldSpec::interval, py::arg("lo") = 0.0, py::arg("hi") = 1.0)
        .def_static("unit_square", &ManifoldSpec::unit_square)
        .def_static("sphere", &ManifoldSpec::sphere, py::arg("dim") = 3)
        .def_static("sphere_segment", &ManifoldSpec::sphere_segment, py::arg("dim"), py::arg("azimuth_lo"),
                    py::arg("azimuth_hi"))
        .def_static("ball", &ManifoldSpec::ball, py::arg("dim"), py::arg("radius"))
        .def_static("unit_volume_ball", &ManifoldSpec::unit_volume_ball, py::arg("dim") = 2)
        .def_property_readonly("kind", [](const ManifoldSpec& s) { return to_string(s.kind); })
        .def_property_readonly("ambient_dim", &ManifoldSpec::ambient_dim)
        .def_property_readonly("volume", &ManifoldSpec::volume)
        .def("__repr__", [](const ManifoldSpec& s) { return "<Manifold " + to_string(s.kind) + ">"; });

    m.def(
        "sample",
        [](const ManifoldSpec& spec, std::size_t n, std::uint64_t seed) {
            return sample_manifold(spec, n, seed).points;
        },
        py::arg("manifold"), py::arg("n"), py::arg("seed"), "Uniform i.i.d. sample as an n x d array.");

    py::class_<GroundedGraph>(m, "Graph")
        .def_property_readonly("n", &GroundedGraph::size)
        .def_property_readonly("rho", &GroundedGraph::rho)
        .def_property_readonly("edge_count", &GroundedGraph::edge_count)
        .def_property_readonly("max_degree", &GroundedGraph::max_degree)
        .def_property_readonly("mean_degree", &GroundedGraph::mean_degree)
        .def_property_readonly("degrees",
                               [](const GroundedGraph& g) {
                                   auto d = g.degrees();
                                   return std::vector<double>(d.begin(), d.end());
                               })
        .def("edges",
             [](const GroundedGraph& g) {
                 const auto e = g.edges();
                 Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor> out(static_cast<Eigen::Index>(e.size()), 3);
                 for (std::size_t k = 0; k < e.size(); ++k)
                     out.row(static_cast<Eigen::Index>(k)) << e[k].i, e[k].j, e[k].weight;
                 return out;
             },
             "Edge list as rows (i, j, weight) with i < j.")
        .def("with_rho", &GroundedGraph::with_rho, py::arg("rho"))
        .def("is_connected", &GroundedGraph::is_connected);

    m.def(
        "build_graph",
        [](const RowMatrix& points, double bandwidth, double rho_g, const std::string& kernel,
           std::optional<ManifoldSpec> manifold) {
            const KernelSpec k{kernel_kind_from_string(kernel), bandwidth};
            return build_grounded_graph(cloud_from(points, manifold), k, rho_g);
        },
        py::arg("points"), py::arg("bandwidth"), py::arg("rho_g"), py::arg("kernel") = "radial",
        py::arg("manifold") = py::none(), "Grounded graph with weights k/n and ground weight rho_g.");

    m.def(
        "solve",
        [](const GroundedGraph& g, std::optional<std::vector<double>> center, double radius,
           std::optional<std::vector<std::size_t>> nodes, const std::string& mode, double tol,
           std::size_t max_iters, double tau) {
            const auto src = region(g, center, radius, nodes);
            auto [v, rep] = solve(g, src, solver_config(mode, tol, max_iters, tau));
            return py::make_tuple(v.values, report_dict(rep));
        },
        py::arg("graph"), py::arg("source_center") = py::none(), py::arg("source_radius") = 0.0,
        py::arg("source_nodes") = py::none(), py::arg("mode") = "full_power", py::arg("tol") = 1e-10,
        py::arg("max_iters") = 1'000'000, py::arg("tau") = 0.01,
        "Grounded voltage; returns (values, report).");

    m.def(
        "baseline",
        [](const GroundedGraph& g, const std::vector<double>& source_center, double source_radius,
           const std::vector<double>& sink_center, double sink_radius, const std::string& method) {
            if (!g.cloud()) throw ValidationError("baseline: graph has no coordinates");
            const auto mth = baseline_method_from_string(method);
            const auto spec =
                make_source_sink(*g.cloud(), source_center, source_radius, sink_center, sink_radius, mth);
            if (mth == BaselineMethod::pm) {
                auto [v, rep] = solve_pm(g, spec);
                return v.values;
            }
            return er_voltage(g, spec).x;
        },
        py::arg("graph"), py::arg("source_center"), py::arg("source_radius"), py::arg("sink_center"),
        py::arg("sink_radius"), py::arg("method") = "pm", "Ungrounded source/sink baseline voltage.");

    m.def(
        "effective_resistance",
        [](const GroundedGraph& g, std::size_t l, std::size_t k) { return effective_resistance(g, l, k); },
        py::arg("graph"), py::arg("l"), py::arg("k"));

    m.def(
        "embed",
        [](const GroundedGraph& g, std::size_t landmarks, double radius_s, const std::string& strategy,
           std::uint64_t seed, unsigned threads) {
            if (!g.cloud()) throw ValidationError("embed: graph has no coordinates");
            const auto set =
                select_landmarks(*g.cloud(), landmarks, landmark_strategy_from_string(strategy), seed, radius_s);
            const auto e = voltage_embedding(g, set, SolverConfig{}, threads);
            return py::make_tuple(e.Z, e.landmarks.indices);
        },
        py::arg("graph"), py::arg("landmarks"), py::arg("radius_s"), py::arg("strategy") = "uniform_random",
        py::arg("seed") = 0, py::arg("threads") = 1,
        "Landmark voltage embedding; returns (Z, landmark_indices).");

    m.def(
        "mds",
        [](const Matrix& Z, int d) {
            const auto r = mds_project(Z, d);
            return py::make_tuple(r.coords, r.singular_values);
        },
        py::arg("Z"), py::arg("d"), "Classical MDS by thin SVD; returns (coords, singular_values).");

    m.def(
        "procrustes",
        [](const Matrix& X, const Matrix& Y, bool scaling) {
            const auto r = procrustes_align(X, Y, scaling);
            return py::make_tuple(r.aligned, r.error);
        },
        py::arg("X"), py::arg("Y"), py::arg("scaling") = false, "Align X to Y; returns (aligned, error).");

    m.def(
        "extend",
        [](const GroundedGraph& g, const std::vector<double>& values, std::optional<std::vector<double>> center,
           double radius, std::optional<std::vector<std::size_t>> nodes, const RowMatrix& queries) {
            VoltageFunction v;
            v.values = values;
            v.source = region(g, center, radius, nodes);
            return extend_voltage(g, v, queries);
        },
        py::arg("graph"), py::arg("values"), py::arg("source_center") = py::none(), py::arg("source_radius") = 0.0,
        py::arg("source_nodes") = py::none(), py::arg("queries"),
        "Kernel-average extension to off-sample points; None where no sample is in range.");

    m.def(
        "radial_profile",
        [](const RowMatrix& points, const std::vector<double>& values, const std::vector<double>& center,
           std::size_t n_bins, std::optional<double> max_distance, std::optional<ManifoldSpec> manifold) {
            const auto cloud = cloud_from(points, manifold);
            const auto p = radial_profile(*cloud, values, center, n_bins, max_distance);
            py::dict d;
            d["bin_edges"] = p.bin_edges;
            d["bin_mean"] = p.bin_mean;
            d["bin_stddev"] = p.bin_stddev;
            d["bin_count"] = p.bin_count;
            d["geodesic"] = p.geodesic;
            return d;
        },
        py::arg("points"), py::arg("values"), py::arg("center"), py::arg("n_bins") = 40,
        py::arg("max_distance") = py::none(), py::arg("manifold") = py::none());

    m.def(
        "satisfies_max_principle",
        [](const std::vector<double>& values, const std::vector<std::size_t>& source_nodes) {
            VoltageFunction v;
            v.values = values;
            v.source = source_from_nodes(values.size(), source_nodes);
            return satisfies_max_principle(v);
        },
        py::arg("values"), py::arg("source_nodes"));
}
