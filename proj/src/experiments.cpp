#include "gvolt/experiments.hpp"

#include "gvolt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gvolt::experiments {

ConvergenceSpec line_convergence(double rho_g, std::vector<std::size_t> n_list, std::vector<std::uint64_t> seeds) {
    ConvergenceSpec s;
    s.manifold = ManifoldSpec::interval(0.0, 3.0);
    s.kernel = KernelSpec::radial(kKernelRadius);
    s.rho_g = rho_g;
    s.source_center = Vector::Constant(1, 2.5);
    s.source_radius = 0.5;
    s.n_list = std::move(n_list);
    s.eval_grid = line_grid(0.0, 3.0, 50);
    s.seeds = std::move(seeds);
    return s;
}

ConvergenceSpec square_convergence(double rho_g, std::vector<std::size_t> n_list, std::vector<std::uint64_t> seeds) {
    ConvergenceSpec s;
    s.manifold = ManifoldSpec::unit_square();
    s.kernel = KernelSpec::radial(kKernelRadius);
    s.rho_g = rho_g;
    s.source_center = Vector::Constant(2, 0.1);
    s.source_radius = 0.1;
    s.n_list = std::move(n_list);
    const auto diag = line_grid(0.0, 1.0, 50);
    s.eval_grid.resize(diag.rows(), 2);
    s.eval_grid.col(0) = diag.col(0);
    s.eval_grid.col(1) = diag.col(0);
    s.seeds = std::move(seeds);
    return s;
}

double dominance_fraction(const ConvergenceReport& faster, const ConvergenceReport& slower, const RowMatrix& grid,
                          double from) {
    if (faster.cells.size() != slower.cells.size() || faster.cells.empty())
        throw ValidationError("dominance: studies differ in shape");
    const std::size_t n_count = faster.pairs.size() + 1;
    const std::size_t seeds = faster.cells.size() / n_count;
    std::size_t total = 0, ok = 0;
    for (Eigen::Index g = 0; g < grid.rows(); ++g) {
        if (grid(g, 0) <= from) continue;
        std::vector<double> f, s;
        for (std::size_t k = 0; k < seeds; ++k) {
            const auto& a = faster.cell(k, n_count - 1).values[static_cast<std::size_t>(g)];
            const auto& b = slower.cell(k, n_count - 1).values[static_cast<std::size_t>(g)];
            if (a) f.push_back(*a);
            if (b) s.push_back(*b);
        }
        if (f.empty() || s.empty()) continue;
        ++total;
        if (median(f) <= median(s)) ++ok;
    }
    return total ? static_cast<double>(ok) / static_cast<double>(total) : 0.0;
}

const ErRun& ErCompare::run(BaselineMethod m, std::size_t k) const {
    for (const auto& r : runs)
        if (r.method == m && r.n == n_list.at(k)) return r;
    throw ValidationError("er compare: no run for " + to_string(m));
}

std::vector<double> ErCompare::successive_sup(BaselineMethod m) const {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < n_list.size(); ++k) {
        const auto& a = run(m, k).field;
        const auto& b = run(m, k + 1).field;
        double sup = 0.0;
        for (std::size_t g = 0; g < a.size(); ++g)
            if (a[g] && b[g]) sup = std::max(sup, std::abs(*a[g] - *b[g]));
        out.push_back(sup);
    }
    return out;
}

ErCompare er_compare(const std::vector<std::size_t>& n_list, std::uint64_t seed,
                     const std::vector<BaselineMethod>& methods) {
    ErCompare out;
    out.n_list = n_list;
    out.grid = square_grid(50);
    const double source[2] = {0.1, 0.1};
    const double sink[2] = {0.7, 0.7};
    const auto kernel = KernelSpec::radial(kKernelRadius);
    for (auto method : methods) {
        for (std::size_t n : n_list) {
            auto cloud = std::make_shared<const PointCloud>(sample_manifold(ManifoldSpec::unit_square(), n, seed));
            const auto graph = build_grounded_graph(cloud, kernel, 0.0);
            const auto spec = make_source_sink(*cloud, source, 0.1, sink, 0.1, method);
            ErRun run;
            run.method = method;
            run.n = n;
            if (method == BaselineMethod::pm) {
                auto [v, report] = solve_pm(graph, spec);
                run.values = std::move(v.values);
                run.iterations = report.iterations;
                for (double x : run.values) run.max_principle = run.max_principle && x >= 0.0 && x <= 1.0;
                for (auto i : spec.source.mask) run.max_principle = run.max_principle && run.values[i] == 1.0;
                for (auto i : spec.sink.mask) run.max_principle = run.max_principle && run.values[i] == 0.0;
            } else {
                auto res = er_voltage(graph, spec);
                run.values = std::move(res.x);
                run.iterations = res.iterations;
            }
            for (double x : run.values) run.max_abs = std::max(run.max_abs, std::abs(x));
            std::size_t large = 0;
            for (double x : run.values) large += std::abs(x) > 0.1 * run.max_abs;
            run.large_fraction = static_cast<double>(large) / static_cast<double>(n);
            std::vector<double> normalized(run.values);
            if (run.max_abs > 0.0)
                for (double& x : normalized) x /= run.max_abs;
            run.field = kernel_average(*cloud, kernel, normalized, out.grid);
            out.runs.push_back(std::move(run));
        }
    }
    return out;
}

namespace {

DiskRun disk_run(const std::shared_ptr<const PointCloud>& cloud, const DiskDecayConfig& cfg, double rho_g,
                 const DecayBounds& shape) {
    const auto graph = build_grounded_graph(cloud, KernelSpec::radial(cfg.r), rho_g);
    const double center[2] = {0.0, 0.0};
    const auto source = select_source(*cloud, center, cfg.r);
    auto [v, report] = solve(graph, source, SolverConfig{});
    DiskRun run;
    run.seed = cloud->seed;
    run.rho_g = rho_g;
    run.report = report;
    run.profile = radial_profile(*cloud, v.values, center, cfg.n_bins, cloud->manifold.radius);
    DecayBounds b = shape;
    b.rho = rho_g;
    b.upper_rate = std::log1p(2.0 * rho_g / b.a);
    b.lower_rate = std::log((b.a + rho_g) / b.gamma);
    run.envelope = compare_envelopes(run.profile, b, cfg.t_max, 3.0);
    run.support = support_radius(run.profile, cfg.tau, b);
    double max_se = 0.0;
    for (std::size_t k = 0; k < run.profile.bins(); ++k)
        if (run.profile.defined(k) && run.profile.bin_count[k] > 1) max_se = std::max(max_se, run.profile.stderr_of(k));
    run.monotone = check_monotone(run.profile, 2.0 * max_se, cfg.r);
    run.max_principle = satisfies_max_principle(v);
    run.values = std::move(v.values);
    return run;
}

}  // namespace

DiskDecay disk_decay(const DiskDecayConfig& cfg) {
    if (cfg.seeds.empty()) throw ValidationError("disk: no seeds");
    const auto spec = ManifoldSpec::unit_volume_ball(2);
    const auto geometry = BoundsGeometry::from_manifold(spec);
    const double a = std::numbers::pi * cfg.r * cfg.r / spec.volume();
    DiskDecay out;
    out.bounds = theoretical_bounds(cfg.r, cfg.rho_ratio * a, geometry, cfg.r, cfg.mc_samples, cfg.seeds.front());
    for (auto seed : cfg.seeds) {
        auto cloud = std::make_shared<const PointCloud>(sample_manifold(spec, cfg.n, seed));
        out.runs.push_back(disk_run(cloud, cfg, cfg.rho_ratio * a, out.bounds));
        if (seed == cfg.seeds.front())
            for (double ratio : cfg.sweep_ratios) out.sweep.push_back(disk_run(cloud, cfg, ratio * a, out.bounds));
    }
    return out;
}

SphereEmbedding sphere_embedding(const SphereEmbeddingConfig& cfg) {
    if (cfg.m_list.empty() || cfg.seeds.empty()) throw ValidationError("sphere embedding: empty m_list or seeds");
    const auto spec = ManifoldSpec::sphere_segment(3, 0.0, std::numbers::pi);
    const double a = cfg.r * cfg.r / 2.0;
    const std::size_t m_max = *std::ranges::max_element(cfg.m_list);
    SphereEmbedding out;
    std::vector<std::vector<double>> errors(cfg.m_list.size());
    for (auto seed : cfg.seeds) {
        auto cloud = std::make_shared<const PointCloud>(sample_manifold(spec, cfg.n, seed));
        const auto graph = build_grounded_graph(cloud, KernelSpec::radial(cfg.r), cfg.rho_ratio * a);
        const auto landmarks = select_landmarks(*cloud, m_max, LandmarkStrategy::uniform_random, seed, cfg.r);
        const auto full = voltage_embedding(graph, landmarks, SolverConfig{}, cfg.threads);
        for (std::size_t i = 0; i < m_max; ++i) {
            VoltageFunction v;
            v.values.assign(full.Z.col(static_cast<Eigen::Index>(i)).data(),
                            full.Z.col(static_cast<Eigen::Index>(i)).data() + full.Z.rows());
            v.source = select_source(*cloud, cloud->row(landmarks.indices[i]), cfg.r);
            out.max_principle = out.max_principle && satisfies_max_principle(v);
        }
        const Matrix truth = cloud->points;
        for (std::size_t k = 0; k < cfg.m_list.size(); ++k) {
            SphereEmbeddingRun run;
            run.seed = seed;
            run.m = cfg.m_list[k];
            run.Z = full.Z.leftCols(static_cast<Eigen::Index>(run.m));
            run.landmarks.assign(landmarks.indices.begin(), landmarks.indices.begin() + static_cast<std::ptrdiff_t>(run.m));
            run.mds = mds_project(run.Z, std::min<int>(cfg.project_dim, static_cast<int>(run.m)));
            run.procrustes = procrustes_align(run.mds.coords, truth.leftCols(run.mds.coords.cols()), true);
            errors[k].push_back(run.procrustes.error);
            out.runs.push_back(std::move(run));
        }
        out.clouds.push_back(*cloud);
    }
    for (auto& e : errors) out.median_error.push_back(median(e));
    return out;
}

Injectivity sphere_injectivity(const InjectivityConfig& cfg) {
    auto cloud = std::make_shared<const PointCloud>(sample_manifold(ManifoldSpec::sphere(3), cfg.n, cfg.seed));
    const double a = cfg.r * cfg.r / 4.0;
    const auto graph = build_grounded_graph(cloud, KernelSpec::radial(cfg.r), cfg.rho_ratio * a);
    const RowMatrix centers = RowMatrix::Identity(3, 3);
    const auto landmarks = landmarks_at(*cloud, centers, cfg.r);
    const auto emb = voltage_embedding(graph, landmarks, SolverConfig{});
    Injectivity out;
    out.epsilon = chord_to_angle(cfg.r) * std::sqrt(3.0);
    out.report = check_injectivity(emb.Z, *cloud, out.epsilon, cfg.eta, cfg.pairs, cfg.seed);
    for (int i = 0; i < 3; ++i) {
        VoltageFunction v;
        v.values.assign(emb.Z.col(i).data(), emb.Z.col(i).data() + emb.Z.rows());
        v.source = select_source(*cloud, std::span<const double>(centers.row(i).data(), 3), cfg.r);
        out.max_principle = out.max_principle && satisfies_max_principle(v);
    }
    out.Z = emb.Z;
    return out;
}

}  // namespace gvolt::experiments
