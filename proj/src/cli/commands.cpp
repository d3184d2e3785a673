#include "gvolt/analysis.hpp"
#include "gvolt/cli.hpp"
#include "gvolt/errors.hpp"
#include "gvolt/experiments.hpp"
#include "gvolt/io.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>

namespace gvolt::cli {

namespace fs = std::filesystem;

namespace {

using Applier = std::function<void(RunConfig&)>;

/// Registers a flag whose value, when given, overrides the config file.
template <class T>
CLI::Option* flag(CLI::App* app, std::vector<Applier>& out, const std::string& name,
                  std::function<void(RunConfig&, const T&)> set, const std::string& help) {
    auto value = std::make_shared<T>();
    auto* opt = app->add_option(name, *value, help);
    out.push_back([opt, value, set](RunConfig& c) {
        if (opt->count() > 0) set(c, *value);
    });
    return opt;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        auto field = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        try {
            std::size_t used = 0;
            out.push_back(std::stod(field, &used));
            if (used != field.size()) throw std::invalid_argument(field);
        } catch (const std::exception&) {
            throw ValidationError(what + ": not a number: '" + field + "'");
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

template <class U>
std::vector<U> parse_uints(const std::string& text, const std::string& what) {
    std::vector<U> out;
    for (double x : parse_list(text, what)) {
        if (x < 0 || x != std::floor(x)) throw ValidationError(what + ": expected non-negative integers");
        out.push_back(static_cast<U>(x));
    }
    return out;
}

void add_manifold_flags(CLI::App* app, std::vector<Applier>& ap) {
    flag<std::string>(app, ap, "--manifold", [](RunConfig& c, const std::string& v) {
        c.manifold = default_manifold(v);
        c.has_manifold = true;
    }, "interval | unit_square | sphere | sphere_segment | disk | ball");
    flag<double>(app, ap, "--lo", [](RunConfig& c, const double& v) { c.manifold.lo = v; }, "interval lower end");
    flag<double>(app, ap, "--hi", [](RunConfig& c, const double& v) { c.manifold.hi = v; }, "interval upper end");
    flag<int>(app, ap, "--dim", [](RunConfig& c, const int& v) {
        c.manifold.dim = v;
        if (c.manifold.kind == ManifoldSpec::Kind::ball) c.manifold = ManifoldSpec::unit_volume_ball(c.manifold.dim);
    }, "ambient dimension (sphere, sphere_segment, ball)");
    flag<double>(app, ap, "--azimuth-lo", [](RunConfig& c, const double& v) { c.manifold.azimuth_lo = v; }, "segment azimuth start");
    flag<double>(app, ap, "--azimuth-hi", [](RunConfig& c, const double& v) { c.manifold.azimuth_hi = v; }, "segment azimuth end");
    flag<double>(app, ap, "--radius", [](RunConfig& c, const double& v) { c.manifold.radius = v; }, "ball radius");
    flag<std::size_t>(app, ap, "--n", [](RunConfig& c, const std::size_t& v) { c.n = v; }, "sample size");
    flag<std::uint64_t>(app, ap, "--seed", [](RunConfig& c, const std::uint64_t& v) { c.seed = v; }, "random seed");
}

void add_graph_flags(CLI::App* app, std::vector<Applier>& ap) {
    flag<std::string>(app, ap, "--kernel", [](RunConfig& c, const std::string& v) { c.kernel.kind = kernel_kind_from_string(v); }, "radial | gaussian");
    flag<double>(app, ap, "--bandwidth,-r", [](RunConfig& c, const double& v) { c.kernel.bandwidth = v; }, "kernel radius r or sigma");
    flag<bool>(app, ap, "--gaussian-cutoff", [](RunConfig& c, const bool& v) { c.graph_options.gaussian_cutoff = v; }, "drop Gaussian weights beyond the cutoff");
    flag<double>(app, ap, "--cutoff-sigmas", [](RunConfig& c, const double& v) { c.graph_options.cutoff_sigmas = v; }, "Gaussian cutoff in sigmas");
    flag<double>(app, ap, "--rho-g", [](RunConfig& c, const double& v) { c.rho_g = v; }, "ground weight");
    flag<std::string>(app, ap, "--points", [](RunConfig& c, const std::string& v) { c.inputs.points = v; }, "points CSV");
    flag<std::string>(app, ap, "--graph", [](RunConfig& c, const std::string& v) { c.inputs.graph = v; }, "edge-list CSV (i,j,weight)");
    flag<std::string>(app, ap, "--subset", [](RunConfig& c, const std::string& v) { c.inputs.subset = v; }, "file of point indices to keep");
}

void add_region_flags(CLI::App* app, std::vector<Applier>& ap, const std::string& which) {
    auto region = [which](RunConfig& c) -> Region& {
        auto& r = which == "source" ? c.source : c.sink;
        if (!r) r.emplace();
        return *r;
    };
    flag<std::string>(app, ap, "--" + which + "-center", [region, which](RunConfig& c, const std::string& v) {
        region(c).center = parse_list(v, which + ".center");
    }, which + " ball center, comma separated");
    flag<double>(app, ap, "--" + which + "-radius", [region](RunConfig& c, const double& v) { region(c).radius = v; },
                 which + " ball radius");
    if (which == "source")
        flag<std::string>(app, ap, "--source-nodes", [region](RunConfig& c, const std::string& v) {
            region(c).nodes = parse_uints<std::size_t>(v, "source.nodes");
        }, "explicit source node indices, comma separated");
}

void add_solver_flags(CLI::App* app, std::vector<Applier>& ap) {
    flag<double>(app, ap, "--tol", [](RunConfig& c, const double& v) { c.solver.tol = v; }, "l-infinity stopping tolerance");
    flag<std::size_t>(app, ap, "--max-iters", [](RunConfig& c, const std::size_t& v) { c.solver.max_iters = v; }, "iteration cap");
    flag<std::string>(app, ap, "--mode", [](RunConfig& c, const std::string& v) { c.solver.mode = solver_mode_from_string(v); }, "full_power | localized | direct_oracle");
    flag<double>(app, ap, "--tau", [](RunConfig& c, const double& v) { c.solver.tau = v; c.analysis_options.tau = v; }, "support threshold");
}

void add_analysis_flags(CLI::App* app, std::vector<Applier>& ap) {
    flag<std::string>(app, ap, "--voltage", [](RunConfig& c, const std::string& v) { c.inputs.voltage = v; }, "voltage CSV");
    flag<std::size_t>(app, ap, "--bins", [](RunConfig& c, const std::size_t& v) { c.analysis_options.n_bins = v; }, "profile bins");
    flag<int>(app, ap, "--t-max", [](RunConfig& c, const int& v) { c.analysis_options.t_max = v; }, "envelope steps");
    flag<std::size_t>(app, ap, "--mc-samples", [](RunConfig& c, const std::size_t& v) { c.analysis_options.mc_samples = v; }, "Monte Carlo samples for Gamma");
    flag<std::string>(app, ap, "--n-list", [](RunConfig& c, const std::string& v) { c.analysis_options.n_list = parse_uints<std::size_t>(v, "analysis_options.n_list"); }, "sample sizes, comma separated");
    flag<std::string>(app, ap, "--seeds", [](RunConfig& c, const std::string& v) { c.analysis_options.seeds = parse_uints<std::uint64_t>(v, "analysis_options.seeds"); }, "seeds, comma separated");
    flag<std::string>(app, ap, "--grid", [](RunConfig& c, const std::string& v) { c.analysis_options.grid.kind = v; }, "line | square | diagonal");
    flag<double>(app, ap, "--grid-lo", [](RunConfig& c, const double& v) { c.analysis_options.grid.lo = v; }, "grid start");
    flag<double>(app, ap, "--grid-hi", [](RunConfig& c, const double& v) { c.analysis_options.grid.hi = v; }, "grid end");
    flag<std::size_t>(app, ap, "--grid-count", [](RunConfig& c, const std::size_t& v) { c.analysis_options.grid.count = v; }, "grid points (per side for square)");
    flag<unsigned>(app, ap, "--threads", [](RunConfig& c, const unsigned& v) { c.analysis_options.threads = v; c.landmarks.threads = v; }, "worker threads");
}

// ---- shared helpers -----------------------------------------------------------

std::shared_ptr<const PointCloud> load_cloud(const RunConfig& c, bool required = true) {
    PointCloud cloud;
    if (!c.inputs.points.empty()) {
        cloud.points = io::read_matrix_csv(c.inputs.points);
        cloud.manifold = c.has_manifold ? c.manifold : ManifoldSpec::external(static_cast<int>(cloud.points.cols()));
        cloud.seed = c.seed;
        if (c.has_manifold && c.manifold.ambient_dim() != cloud.dim())
            throw ValidationError("manifold.dim: points file has " + std::to_string(cloud.dim()) + " columns");
    } else if (c.has_manifold && c.n > 0) {
        cloud = sample_manifold(c.manifold, c.n, c.seed);
    } else if (required) {
        throw ValidationError("inputs.points: give a points CSV, or a manifold together with n");
    } else {
        return nullptr;
    }
    if (!c.inputs.subset.empty()) {
        const auto idx = io::read_index_file(c.inputs.subset);
        RowMatrix kept(static_cast<Eigen::Index>(idx.size()), cloud.points.cols());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            if (idx[k] >= cloud.size()) throw ValidationError("inputs.subset: index " + std::to_string(idx[k]) + " out of range");
            kept.row(static_cast<Eigen::Index>(k)) = cloud.points.row(static_cast<Eigen::Index>(idx[k]));
        }
        cloud.points = std::move(kept);
    }
    return std::make_shared<const PointCloud>(std::move(cloud));
}

GroundedGraph load_graph(const RunConfig& c, const std::shared_ptr<const PointCloud>& cloud) {
    if (!c.inputs.graph.empty()) {
        const std::size_t n = cloud ? cloud->size() : c.n;
        if (n == 0) throw ValidationError("n: an imported graph without points needs n");
        const auto edges = io::read_edge_csv(c.inputs.graph);
        return GroundedGraph::from_edges(n, edges, c.rho_g, cloud ? std::optional<KernelSpec>(c.kernel) : std::nullopt, cloud);
    }
    if (!cloud) throw ValidationError("inputs.graph: give an edge list or points to build from");
    return build_grounded_graph(cloud, c.kernel, c.rho_g, c.graph_options);
}

SourceRegion make_region(const Region& r, const GroundedGraph& g, const std::string& what) {
    if (!r.nodes.empty()) return source_from_nodes(g.size(), r.nodes);
    if (!g.cloud()) throw ValidationError(what + ".center: geometric regions need point coordinates");
    if (static_cast<int>(r.center.size()) != g.cloud()->dim())
        throw ValidationError(what + ".center: expected " + std::to_string(g.cloud()->dim()) + " coordinates");
    return select_source(*g.cloud(), r.center, r.radius);
}

const Region& need(const std::optional<Region>& r, const std::string& what) {
    if (!r) throw ValidationError(what + ": required");
    return *r;
}

json report_json(const SolveReport& r) {
    return {{"iterations", r.iterations},
            {"final_residual", r.final_residual},
            {"contraction_ratio_observed", r.contraction_ratio_observed},
            {"contraction_bound", r.contraction_bound},
            {"wall_time", r.wall_time},
            {"converged", r.converged},
            {"warnings", r.warnings}};
}

RowMatrix make_grid(const Grid& g) {
    if (g.kind == "line") return line_grid(g.lo, g.hi, g.count);
    if (g.kind == "square") return square_grid(g.count);
    const auto t = line_grid(g.lo, g.hi, g.count);
    RowMatrix out(t.rows(), 2);
    out.col(0) = t.col(0);
    out.col(1) = t.col(0);
    return out;
}

std::string fmt(double x) { return io::format_double(x); }

void write_json(const fs::path& p, const json& j) { io::write_text_atomic(p, j.dump(2) + "\n"); }

/// Collects output files and writes the manifest last.
class Run {
public:
    Run(RunConfig cfg) : cfg_(std::move(cfg)), start_(std::chrono::steady_clock::now()) {
        dir_ = cfg_.output_dir;
        fs::create_directories(dir_);
    }
    fs::path path(const std::string& name) {
        outputs_.push_back(name);
        return dir_ / name;
    }
    const RunConfig& cfg() const { return cfg_; }
    void finish(const json& extra = json::object()) {
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        json m;
        m["manifest_version"] = 1;
        m["tool"] = "gvolt";
        m["version"] = kVersion;
        m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION);
        m["compiler"] = __VERSION__;
        m["command"] = cfg_.command;
        m["seed"] = cfg_.seed;
        m["wall_time"] = wall;
        m["outputs"] = outputs_;
        m["config"] = to_json(cfg_);
        if (!extra.empty()) m["summary"] = extra;
        write_json(dir_ / "manifest.json", m);
    }

private:
    RunConfig cfg_;
    fs::path dir_;
    std::vector<std::string> outputs_;
    std::chrono::steady_clock::time_point start_;
};

// ---- commands -----------------------------------------------------------------

void cmd_sample(Run& run) {
    const auto& c = run.cfg();
    if (!c.has_manifold) throw ValidationError("manifold: required");
    if (c.n < 1) throw ValidationError("n: sample size must be >= 1");
    const auto cloud = sample_manifold(c.manifold, c.n, c.seed);
    io::write_matrix_csv(run.path("points.csv"), cloud.points);
    write_json(run.path("points.json"), {{"manifold", to_json(c)["manifold"]}, {"n", cloud.size()},
                                         {"d", cloud.dim()}, {"seed", c.seed}});
    run.finish();
}

void cmd_build(Run& run) {
    const auto& c = run.cfg();
    const auto cloud = load_cloud(c);
    const auto graph = build_grounded_graph(cloud, c.kernel, c.rho_g, c.graph_options);
    io::write_edge_csv(run.path("edges.csv"), graph);
    const json sidecar = {{"n", graph.size()}, {"rho_g", c.rho_g},
                          {"kernel", to_json(c)["kernel"]}, {"edge_count", graph.edge_count()}};
    write_json(run.path("graph.json"), sidecar);
    run.finish(sidecar);
}

void cmd_solve(Run& run) {
    const auto& c = run.cfg();
    const auto cloud = load_cloud(c, c.inputs.graph.empty());
    const auto graph = load_graph(c, cloud);
    const auto source = make_region(need(c.source, "source"), graph, "source");
    auto [v, report] = solve(graph, source, c.solver);
    io::write_voltage_csv(run.path("voltage.csv"), v.values);
    json rep = report_json(report);
    rep["source_size"] = source.mask.size();
    if (v.support) rep["support_size"] = v.support->size();
    write_json(run.path("report.json"), rep);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    if (!report.converged) throw NumericalError("solver did not converge within max_iters (residual " + fmt(report.final_residual) + ")");
    run.finish(rep);
}

void cmd_baseline(Run& run) {
    const auto& c = run.cfg();
    const auto cloud = load_cloud(c);
    const auto graph = build_grounded_graph(cloud, c.kernel, 0.0, c.graph_options);
    const auto& src = need(c.source, "source");
    const auto& snk = need(c.sink, "sink");
    if (src.center.empty() || snk.center.empty()) throw ValidationError("source/sink: baselines need ball centers");
    const auto spec = make_source_sink(*cloud, src.center, src.radius, snk.center, snk.radius, c.method);
    json rep;
    std::vector<double> values;
    if (c.method == BaselineMethod::pm) {
        auto [v, report] = solve_pm(graph, spec, c.solver);
        values = std::move(v.values);
        rep = report_json(report);
        if (!report.converged) throw NumericalError("power method did not converge within max_iters");
    } else {
        auto res = er_voltage(graph, spec);
        values = std::move(res.x);
        rep = {{"iterations", res.iterations}, {"relative_residual", res.relative_residual}};
    }
    rep["method"] = to_string(c.method);
    rep["source_node"] = spec.source_node;
    rep["sink_node"] = spec.sink_node;
    io::write_voltage_csv(run.path("voltage.csv"), values);
    write_json(run.path("report.json"), rep);
    run.finish(rep);
}

void cmd_embed(Run& run) {
    const auto& c = run.cfg();
    const auto cloud = load_cloud(c);
    const auto graph = load_graph(c, cloud);
    if (c.landmarks.m < 1) throw ValidationError("landmarks.m: must be >= 1");
    const double radius_s = c.landmarks.radius_s.value_or(c.kernel.bandwidth);
    const auto lm = select_landmarks(*cloud, c.landmarks.m, c.landmarks.strategy, c.seed, radius_s);
    const auto emb = voltage_embedding(graph, lm, c.solver, std::max(1u, c.landmarks.threads));
    io::write_matrix_csv(run.path("embedding.csv"), emb.Z);
    write_json(run.path("landmarks.json"), {{"indices", lm.indices}, {"radius_s", lm.radius_s},
                                            {"strategy", to_string(lm.strategy)}, {"seed", lm.seed}});
    json summary = {{"n", cloud->size()}, {"m", lm.indices.size()}};
    std::vector<std::size_t> iterations;
    for (const auto& r : emb.reports) iterations.push_back(r.iterations);
    summary["iterations"] = iterations;
    if (c.landmarks.project > 0) {
        const auto mds = mds_project(emb.Z, c.landmarks.project);
        io::write_matrix_csv(run.path("projection.csv"), mds.coords);
        io::write_matrix_csv(run.path("spectrum.csv"), Matrix(mds.singular_values));
    }
    run.finish(summary);
}

RadialProfile profile_from_inputs(const RunConfig& c, const PointCloud& cloud, std::vector<double>& values) {
    if (c.inputs.voltage.empty()) throw ValidationError("inputs.voltage: required");
    values = io::read_voltage_csv(c.inputs.voltage);
    const auto& src = need(c.source, "source");
    if (src.center.empty()) throw ValidationError("source.center: required for profiles");
    return radial_profile(cloud, values, src.center, c.analysis_options.n_bins);
}

DecayBounds bounds_from(const RunConfig& c) {
    if (!c.has_manifold) throw ValidationError("manifold: required for bounds");
    const double rs = c.source ? c.source->radius : c.kernel.bandwidth;
    return theoretical_bounds(c.kernel.bandwidth, c.rho_g, BoundsGeometry::from_manifold(c.manifold), rs,
                              c.analysis_options.mc_samples, c.seed);
}

json bounds_json(const DecayBounds& b) {
    return {{"a", b.a}, {"gamma", b.gamma}, {"gamma_stderr", b.gamma_stderr}, {"step", b.step},
            {"lower_step", b.lower_step}, {"upper_rate", b.upper_rate}, {"lower_rate", b.lower_rate},
            {"lower_exponent", b.lower_exponent}, {"r", b.r}, {"rho", b.rho}, {"source_radius", b.source_radius}};
}

void write_profile(Run& run, const RadialProfile& p) {
    std::string csv, dat;
    for (std::size_t k = 0; k < p.bins(); ++k) {
        csv += fmt(p.bin_edges[k]) + ',' + fmt(p.bin_edges[k + 1]) + ',' + fmt(p.center(k)) + ',' + fmt(p.bin_mean[k]) +
               ',' + fmt(p.bin_stddev[k]) + ',' + std::to_string(p.bin_count[k]) + '\n';
        if (p.defined(k)) dat += fmt(p.center(k)) + ' ' + fmt(p.bin_mean[k]) + '\n';
    }
    io::write_text_atomic(run.path("profile.csv"), csv);
    io::write_text_atomic(run.path("profile.dat"), dat);
}

void cmd_analyze(Run& run) {
    const auto& c = run.cfg();
    const auto& kind = c.analysis;
    if (kind == "profile") {
        const auto cloud = load_cloud(c);
        std::vector<double> values;
        const auto prof = profile_from_inputs(c, *cloud, values);
        write_profile(run, prof);
        double max_se = 0.0;
        for (std::size_t k = 0; k < prof.bins(); ++k)
            if (prof.bin_count[k] > 1) max_se = std::max(max_se, prof.stderr_of(k));
        const auto mono = check_monotone(prof, 2.0 * max_se, need(c.source, "source").radius);
        json s = {{"monotone", mono.ok}, {"violations", mono.violations}, {"slack", 2.0 * max_se}};
        write_json(run.path("summary.json"), s);
        run.finish(s);
    } else if (kind == "bounds") {
        const auto b = bounds_from(c);
        std::string csv, up, lo;
        for (int t = 1; t <= c.analysis_options.t_max; ++t) {
            const double z = t * b.step;
            const double lower = b.lower_envelope(t * b.step / b.lower_step);
            csv += std::to_string(t) + ',' + fmt(z) + ',' + fmt(b.upper_envelope(t)) + ',' + fmt(lower) + '\n';
            up += fmt(z) + ' ' + fmt(b.upper_envelope(t)) + '\n';
            lo += fmt(z) + ' ' + fmt(lower) + '\n';
        }
        io::write_text_atomic(run.path("envelopes.csv"), csv);
        io::write_text_atomic(run.path("upper.dat"), up);
        io::write_text_atomic(run.path("lower.dat"), lo);
        write_json(run.path("bounds.json"), bounds_json(b));
        run.finish(bounds_json(b));
    } else if (kind == "support") {
        const auto cloud = load_cloud(c);
        std::vector<double> values;
        const auto prof = profile_from_inputs(c, *cloud, values);
        const auto b = bounds_from(c);
        const auto s = support_radius(prof, c.analysis_options.tau, b);
        const auto rows = compare_envelopes(prof, b, c.analysis_options.t_max, 3.0);
        std::string env;
        bool within = true;
        for (const auto& r : rows) {
            env += std::to_string(r.t) + ',' + fmt(r.z) + ',' + fmt(r.h) + ',' + fmt(r.h_stderr) + ',' + fmt(r.lower) +
                   ',' + fmt(r.upper) + ',' + (r.within ? "1" : "0") + '\n';
            within = within && r.within;
        }
        write_profile(run, prof);
        io::write_text_atomic(run.path("envelope_check.csv"), env);
        json j = {{"tau", s.tau}, {"r_supp_empirical", s.r_supp_empirical}, {"r_l", s.r_l}, {"r_u", s.r_u},
                  {"bin_width", prof.width()}, {"degenerate", s.degenerate}, {"envelopes_hold", within},
                  {"within_bounds", s.r_supp_empirical >= s.r_l - prof.width() && s.r_supp_empirical <= s.r_u + prof.width()}};
        write_json(run.path("support.json"), j);
        run.finish(j);
    } else if (kind == "convergence") {
        if (!c.has_manifold) throw ValidationError("manifold: required");
        const auto& src = need(c.source, "source");
        ConvergenceSpec spec;
        spec.manifold = c.manifold;
        spec.kernel = c.kernel;
        spec.rho_g = c.rho_g;
        spec.source_center = Eigen::Map<const Vector>(src.center.data(), static_cast<Eigen::Index>(src.center.size()));
        spec.source_radius = src.radius;
        spec.n_list = c.analysis_options.n_list;
        spec.seeds = c.analysis_options.seeds.empty() ? std::vector<std::uint64_t>{c.seed} : c.analysis_options.seeds;
        spec.eval_grid = make_grid(c.analysis_options.grid);
        spec.solver = c.solver;
        spec.threads = c.analysis_options.threads;
        const auto rep = convergence_study(spec);
        std::string table;
        json pairs = json::array();
        for (const auto& p : rep.pairs) {
            table += std::to_string(p.n_from) + ',' + std::to_string(p.n_to) + ',' + fmt(p.median_sup) + ',' + fmt(p.median_mean) + '\n';
            pairs.push_back({{"n_from", p.n_from}, {"n_to", p.n_to}, {"median_sup", p.median_sup},
                             {"median_mean", p.median_mean}, {"sup_per_seed", p.sup_diff}, {"excluded", p.excluded}});
        }
        io::write_text_atomic(run.path("convergence.csv"), table);
        for (const auto& cell : rep.cells) {
            std::vector<double> x(static_cast<std::size_t>(spec.eval_grid.rows()));
            for (std::size_t g = 0; g < x.size(); ++g) x[g] = spec.eval_grid(static_cast<Eigen::Index>(g), 0);
            io::write_curve(run.path("curve_n" + std::to_string(cell.n) + "_seed" + std::to_string(cell.seed) + ".dat"), x, cell.values);
        }
        bool decreasing = true;
        for (std::size_t k = 1; k < rep.pairs.size(); ++k) decreasing = decreasing && rep.pairs[k].median_sup < rep.pairs[k - 1].median_sup;
        json s = {{"pairs", pairs}, {"strictly_decreasing", decreasing}};
        write_json(run.path("summary.json"), s);
        run.finish(s);
    } else {
        throw ValidationError("analysis: expected profile, bounds, support or convergence, got '" + kind + "'");
    }
}

// ---- figure recipes -------------------------------------------------------------

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> d) {
    return v.empty() ? d : v;
}

template <class T>
bool strictly_decreasing(const std::vector<T>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] < v[k - 1])) return false;
    return true;
}

void repro_er_compare(Run& run) {
    const auto& c = run.cfg();
    const auto n_list = or_default<std::size_t>(c.analysis_options.n_list, {2048, 32768});
    const std::uint64_t seed = c.analysis_options.seeds.empty() ? c.seed : c.analysis_options.seeds.front();
    const auto res = experiments::er_compare(n_list, seed);
    json methods = json::object();
    for (auto m : experiments::kAllBaselines) {
        json fr = json::array();
        for (std::size_t k = 0; k < n_list.size(); ++k) {
            const auto& r = res.run(m, k);
            const std::string stem = to_string(m) + "_n" + std::to_string(r.n);
            io::write_voltage_csv(run.path(stem + ".csv"), r.values);
            std::string grid;
            for (Eigen::Index g = 0; g < res.grid.rows(); ++g)
                grid += fmt(res.grid(g, 0)) + ',' + fmt(res.grid(g, 1)) + ',' +
                        (r.field[static_cast<std::size_t>(g)] ? fmt(*r.field[static_cast<std::size_t>(g)]) : "nan") + '\n';
            io::write_text_atomic(run.path(stem + "_grid.csv"), grid);
            fr.push_back(r.large_fraction);
        }
        const auto sup = res.successive_sup(m);
        methods[to_string(m)] = {{"large_fraction", fr}, {"successive_sup", sup}};
    }
    for (std::size_t k = 0; k < n_list.size(); ++k)
        io::write_matrix_csv(run.path("points_n" + std::to_string(n_list[k]) + ".csv"),
                             sample_manifold(ManifoldSpec::unit_square(), n_list[k], seed).points);
    std::vector<double> er_frac, region_sup, pm_sup;
    for (std::size_t k = 0; k < n_list.size(); ++k) er_frac.push_back(res.run(BaselineMethod::point_er, k).large_fraction);
    region_sup = res.successive_sup(BaselineMethod::region_er);
    pm_sup = res.successive_sup(BaselineMethod::pm);
    json checks = {{"point_er_fraction_decreasing", strictly_decreasing(er_frac)},
                   {"region_er_sup_decreasing", strictly_decreasing(region_sup)},
                   {"pm_sup_decreasing", strictly_decreasing(pm_sup)}};
    json s = {{"n_list", n_list}, {"seed", seed}, {"methods", methods}, {"checks", checks}};
    write_json(run.path("summary.json"), s);
    run.finish(s);
}

void repro_voltage_grounded(Run& run) {
    const auto& c = run.cfg();
    const auto n_list = or_default<std::size_t>(c.analysis_options.n_list, {2048, 8192, 32768});
    const auto seeds = or_default<std::uint64_t>(c.analysis_options.seeds, {c.seed});
    json studies = json::object();
    auto emit = [&](const std::string& name, ConvergenceSpec spec) {
        spec.threads = c.analysis_options.threads;
        auto rep = convergence_study(spec);
        std::vector<double> x(static_cast<std::size_t>(spec.eval_grid.rows()));
        for (std::size_t g = 0; g < x.size(); ++g) x[g] = spec.eval_grid(static_cast<Eigen::Index>(g), 0);
        for (std::size_t k = 0; k < n_list.size(); ++k)
            io::write_curve(run.path(name + "_n" + std::to_string(n_list[k]) + ".dat"), x, rep.cell(0, k).values);
        std::vector<double> med;
        for (const auto& p : rep.pairs) med.push_back(p.median_sup);
        studies[name] = {{"rho_g", spec.rho_g}, {"median_sup", med}, {"strictly_decreasing", strictly_decreasing(med)}};
        return rep;
    };
    const auto large = experiments::line_convergence(experiments::kLineRhoLarge, n_list, seeds);
    const auto small = experiments::line_convergence(experiments::kLineRhoSmall, n_list, seeds);
    const auto rl = emit("line_rho_large", large);
    const auto rs = emit("line_rho_small", small);
    emit("square_diagonal", experiments::square_convergence(experiments::kSquareRho, n_list, seeds));
    const double dom = experiments::dominance_fraction(rl, rs, large.eval_grid, 0.0);
    json s = {{"n_list", n_list}, {"seeds", seeds}, {"studies", studies},
              {"checks", {{"large_rho_dominated_fraction", dom}, {"large_rho_decays_faster", dom == 1.0}}}};
    write_json(run.path("summary.json"), s);
    run.finish(s);
}

void repro_sphere_embedding(Run& run) {
    const auto& c = run.cfg();
    experiments::SphereEmbeddingConfig cfg;
    if (c.n) cfg.n = c.n;
    cfg.seeds = or_default<std::uint64_t>(c.analysis_options.seeds, cfg.seeds);
    cfg.threads = std::max(1u, c.analysis_options.threads);
    const auto res = experiments::sphere_embedding(cfg);
    std::string errors;
    for (const auto& r : res.runs) {
        const std::string stem = "m" + std::to_string(r.m) + "_seed" + std::to_string(r.seed);
        io::write_matrix_csv(run.path("embedding_" + stem + ".csv"), r.Z);
        io::write_matrix_csv(run.path("projection_" + stem + ".csv"), r.mds.coords);
        io::write_matrix_csv(run.path("aligned_" + stem + ".csv"), r.procrustes.aligned);
        errors += std::to_string(r.m) + ',' + std::to_string(r.seed) + ',' + fmt(r.procrustes.error) + '\n';
    }
    for (std::size_t k = 0; k < res.clouds.size(); ++k)
        io::write_matrix_csv(run.path("points_seed" + std::to_string(cfg.seeds[k]) + ".csv"), res.clouds[k].points);
    io::write_text_atomic(run.path("procrustes_errors.csv"), errors);
    bool non_increasing = true;
    for (std::size_t k = 1; k < res.median_error.size(); ++k)
        non_increasing = non_increasing && res.median_error[k] <= res.median_error[k - 1];
    json s = {{"n", cfg.n}, {"m_list", cfg.m_list}, {"seeds", cfg.seeds}, {"r", cfg.r},
              {"rho_g", cfg.rho_ratio * cfg.r * cfg.r / 2.0}, {"median_error", res.median_error},
              {"checks", {{"median_error_non_increasing", non_increasing}, {"max_principle", res.max_principle}}}};
    write_json(run.path("summary.json"), s);
    run.finish(s);
}

void cmd_repro(Run& run) {
    const auto& f = run.cfg().figure;
    if (f == "fig_er_compare") return repro_er_compare(run);
    if (f == "fig_voltage_grounded") return repro_voltage_grounded(run);
    if (f == "fig_sphere_embedding") return repro_sphere_embedding(run);
    throw ValidationError("figure: expected fig_er_compare, fig_voltage_grounded or fig_sphere_embedding, got '" + f + "'");
}

std::string absolute_or_empty(const std::string& p) { return p.empty() ? p : fs::absolute(p).lexically_normal().string(); }

int dispatch(RunConfig cfg) {
    if (cfg.output_dir.empty()) {
        const char* env = std::getenv(kOutputDirEnv);
        cfg.output_dir = env && *env ? env : "gvolt_out";
    }
    cfg.output_dir = absolute_or_empty(cfg.output_dir);
    cfg.inputs.points = absolute_or_empty(cfg.inputs.points);
    cfg.inputs.graph = absolute_or_empty(cfg.inputs.graph);
    cfg.inputs.voltage = absolute_or_empty(cfg.inputs.voltage);
    cfg.inputs.subset = absolute_or_empty(cfg.inputs.subset);
    cfg.solver.validate();
    cfg.kernel.validate();
    if (cfg.has_manifold) cfg.manifold.validate();

    Run run(cfg);
    const auto& cmd = cfg.command;
    if (cmd == "sample") cmd_sample(run);
    else if (cmd == "build") cmd_build(run);
    else if (cmd == "solve") cmd_solve(run);
    else if (cmd == "baseline") cmd_baseline(run);
    else if (cmd == "embed") cmd_embed(run);
    else if (cmd == "analyze") cmd_analyze(run);
    else if (cmd == "repro") cmd_repro(run);
    else throw ValidationError("command: unknown command '" + cmd + "'");
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Grounded metric voltage functions: sampling, graphs, solves, baselines, embeddings"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    struct Sub {
        CLI::App* app;
        std::vector<Applier> appliers;
        std::string config_path;
        std::string output_dir;
        std::string positional;
    };
    std::vector<std::unique_ptr<Sub>> subs;
    auto make = [&](const std::string& name, const std::string& help) -> Sub& {
        auto s = std::make_unique<Sub>();
        s->app = app.add_subcommand(name, help);
        s->app->add_option("--config", s->config_path, "RunConfig JSON or a manifest.json from an earlier run");
        s->app->add_option("--output-dir,-o", s->output_dir,
                           std::string("output directory (default $") + kOutputDirEnv + " or ./gvolt_out)");
        subs.push_back(std::move(s));
        return *subs.back();
    };

    auto& sample = make("sample", "draw a uniform sample from a manifold");
    add_manifold_flags(sample.app, sample.appliers);

    auto& build = make("build", "build the grounded graph and export its edge list");
    add_manifold_flags(build.app, build.appliers);
    add_graph_flags(build.app, build.appliers);

    auto& solve_cmd = make("solve", "solve for the grounded voltage of one source region");
    add_manifold_flags(solve_cmd.app, solve_cmd.appliers);
    add_graph_flags(solve_cmd.app, solve_cmd.appliers);
    add_region_flags(solve_cmd.app, solve_cmd.appliers, "source");
    add_solver_flags(solve_cmd.app, solve_cmd.appliers);

    auto& baseline = make("baseline", "ungrounded source/sink baselines (pm, region-er, density-er, er)");
    add_manifold_flags(baseline.app, baseline.appliers);
    add_graph_flags(baseline.app, baseline.appliers);
    add_region_flags(baseline.app, baseline.appliers, "source");
    add_region_flags(baseline.app, baseline.appliers, "sink");
    add_solver_flags(baseline.app, baseline.appliers);
    flag<std::string>(baseline.app, baseline.appliers, "--method", [](RunConfig& c, const std::string& v) {
        c.method = baseline_method_from_string(v);
    }, "pm | region-er | density-er | er");

    auto& embed = make("embed", "landmark voltage embedding with optional MDS projection");
    add_manifold_flags(embed.app, embed.appliers);
    add_graph_flags(embed.app, embed.appliers);
    add_solver_flags(embed.app, embed.appliers);
    flag<std::size_t>(embed.app, embed.appliers, "--landmarks", [](RunConfig& c, const std::size_t& v) { c.landmarks.m = v; }, "number of landmarks m");
    flag<std::string>(embed.app, embed.appliers, "--strategy", [](RunConfig& c, const std::string& v) {
        c.landmarks.strategy = landmark_strategy_from_string(v);
    }, "uniform_random | farthest_point");
    flag<double>(embed.app, embed.appliers, "--radius-s", [](RunConfig& c, const double& v) { c.landmarks.radius_s = v; }, "landmark source radius (default: kernel radius)");
    flag<int>(embed.app, embed.appliers, "--project", [](RunConfig& c, const int& v) { c.landmarks.project = v; }, "MDS dimension");
    flag<unsigned>(embed.app, embed.appliers, "--threads", [](RunConfig& c, const unsigned& v) { c.landmarks.threads = v; }, "worker threads");

    auto& analyze = make("analyze", "profiles, decay bounds, support radius, convergence in n");
    analyze.app->add_option("kind", analyze.positional, "profile | bounds | support | convergence");
    add_manifold_flags(analyze.app, analyze.appliers);
    add_graph_flags(analyze.app, analyze.appliers);
    add_region_flags(analyze.app, analyze.appliers, "source");
    add_solver_flags(analyze.app, analyze.appliers);
    add_analysis_flags(analyze.app, analyze.appliers);

    auto& repro = make("repro", "figure-data recipes");
    repro.app->add_option("figure", repro.positional, "fig_er_compare | fig_voltage_grounded | fig_sphere_embedding");
    flag<std::size_t>(repro.app, repro.appliers, "--n", [](RunConfig& c, const std::size_t& v) { c.n = v; }, "sample size (fig_sphere_embedding)");
    flag<std::uint64_t>(repro.app, repro.appliers, "--seed", [](RunConfig& c, const std::uint64_t& v) { c.seed = v; }, "random seed");
    add_analysis_flags(repro.app, repro.appliers);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        for (auto& s : subs) {
            if (!s->app->parsed()) continue;
            RunConfig cfg;
            if (!s->config_path.empty()) {
                json doc;
                try {
                    doc = json::parse(io::read_text(s->config_path));
                } catch (const json::parse_error& e) {
                    throw ValidationError(s->config_path + ": invalid JSON: " + e.what());
                }
                cfg = config_from_json(doc);
                if (!cfg.command.empty() && cfg.command != s->app->get_name())
                    throw ValidationError("config.command: file is for '" + cfg.command + "', not '" + s->app->get_name() + "'");
            }
            cfg.command = s->app->get_name();
            for (auto& a : s->appliers) a(cfg);
            if (!s->output_dir.empty()) cfg.output_dir = s->output_dir;
            if (!s->positional.empty()) (cfg.command == "analyze" ? cfg.analysis : cfg.figure) = s->positional;
            return dispatch(std::move(cfg));
        }
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace gvolt::cli
