// One PASS/FAIL line per acceptance criterion. Pass criterion numbers as
// arguments to run a subset; exit status is non-zero if any selected
// criterion fails.

#include "gvolt/analysis.hpp"
#include "gvolt/errors.hpp"
#include "gvolt/experiments.hpp"
#include "gvolt/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace gvolt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// criterion 4 collects from every other suite
struct MaxPrinciple {
    std::size_t checked = 0;
    std::vector<std::string> failures;
    void record(const std::string& where, bool ok) {
        ++checked;
        if (!ok) failures.push_back(where);
    }
} g_max_principle;

std::string fmt(double x, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    return buf;
}

template <class T>
std::string list(const std::vector<T>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(static_cast<double>(v[i]));
    return s + "]";
}

template <class T>
bool strictly_decreasing(const std::vector<T>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (!(v[k] < v[k - 1])) return false;
    return true;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// ---- 1 + 3: random geometric graphs -----------------------------------------------

struct RggSuite {
    double worst_gap = 0.0;
    std::size_t contraction_failures = 0;
    std::size_t iteration_failures = 0;
    std::size_t instances = 0;
    double seconds = 0.0;
    bool ran = false;
};

RggSuite& rgg_suite() {
    static RggSuite suite;
    if (suite.ran) return suite;
    suite.ran = true;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<std::size_t> n_dist(50, 500);
    std::uniform_real_distribution<double> log_rho(std::log(0.1), std::log(10.0));
    const ManifoldSpec manifolds[] = {ManifoldSpec::unit_square(), ManifoldSpec::interval(0, 1), ManifoldSpec::sphere(3),
                                      ManifoldSpec::unit_volume_ball(2)};
    const double radii[] = {0.12, 0.05, 0.35, 0.12};
    for (int k = 0; k < 50; ++k) {
        const std::size_t pick = static_cast<std::size_t>(k) % 4;
        const std::size_t n = n_dist(rng);
        const double rho = std::exp(log_rho(rng));
        auto cloud = std::make_shared<const PointCloud>(sample_manifold(manifolds[pick], n, rng()));
        const auto g = build_grounded_graph(cloud, KernelSpec::radial(radii[pick]), rho);
        const auto src = select_source(*cloud, cloud->row(rng() % n), radii[pick]);
        auto [v, rep] = solve_grounded_emv(g, src);
        const auto direct = solve_direct_oracle(g, src);
        suite.worst_gap = std::max(suite.worst_gap, linf(v.values, direct.values));
        if (rep.contraction_ratio_observed > rep.contraction_bound) ++suite.contraction_failures;
        const double bound = std::log(1.0 / 1e-10) / std::log1p(rho / g.max_degree()) + 2.0;
        if (static_cast<double>(rep.iterations) > bound) ++suite.iteration_failures;
        g_max_principle.record("rgg " + std::to_string(k), satisfies_max_principle(v));
        g_max_principle.record("rgg direct " + std::to_string(k), satisfies_max_principle(direct));
        ++suite.instances;
    }
    suite.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return suite;
}

Outcome criterion_1() {
    const auto& s = rgg_suite();
    return {s.worst_gap <= 1e-9 && s.instances == 50 && s.seconds < 30.0,
            "max |power - direct| = " + fmt(s.worst_gap) + " over " + std::to_string(s.instances) +
                " graphs in " + fmt(s.seconds, 3) + " s"};
}

Outcome criterion_2() {
    const auto t0 = std::chrono::steady_clock::now();
    SolverConfig tight;
    tight.tol = 1e-14;
    SolverConfig direct;
    direct.mode = SolverConfig::Mode::direct_oracle;
    double worst = 0.0;
    const Edge two[] = {{0, 1, 0.5}};
    const auto g2 = GroundedGraph::from_edges(2, two, 1.0);
    const Edge path[] = {{0, 1, 1.0 / 3.0}, {1, 2, 1.0 / 3.0}};
    const auto g3 = GroundedGraph::from_edges(3, path, 1.0);
    for (const auto& cfg : {tight, direct}) {
        auto [a, ra] = solve(g2, source_from_nodes(2, {0}), cfg);
        auto [b, rb] = solve(g3, source_from_nodes(3, {0}), cfg);
        worst = std::max({worst, std::abs(a.values[1] - 1.0 / 3.0), std::abs(b.values[1] - 4.0 / 19.0),
                          std::abs(b.values[2] - 1.0 / 19.0)});
        g_max_principle.record("two-node", satisfies_max_principle(a));
        g_max_principle.record("path", satisfies_max_principle(b));
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {worst <= 1e-12 && secs < 1.0, "max error vs 1/3, 4/19, 1/19 = " + fmt(worst) + " (power method at tol 1e-14 and direct)"};
}

Outcome criterion_3() {
    const auto& s = rgg_suite();
    return {s.contraction_failures == 0 && s.iteration_failures == 0,
            std::to_string(s.contraction_failures) + " ratio violations, " + std::to_string(s.iteration_failures) +
                " iteration-bound violations over " + std::to_string(s.instances) + " solves"};
}

Outcome criterion_5() {
    const auto spec = experiments::line_convergence(experiments::kLineRhoLarge, {2048, 8192, 32768}, {1, 2, 3, 4, 5});
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = convergence_study(spec);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<double> med;
    for (const auto& p : rep.pairs) med.push_back(p.median_sup);
    for (const auto& c : rep.cells)
        g_max_principle.record("line n=" + std::to_string(c.n) + " seed " + std::to_string(c.seed), c.max_principle);
    return {strictly_decreasing(med) && med.size() == 2 && secs <= 300.0,
            "median sup differences " + list(med) + " (2^11->2^13, 2^13->2^15), " + fmt(secs, 3) + " s"};
}

const experiments::DiskDecay& disk() {
    static const auto result = [] {
        experiments::DiskDecayConfig cfg;
        return experiments::disk_decay(cfg);
    }();
    return result;
}

Outcome criterion_6() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& d = disk();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool ok = true;
    std::size_t rows = 0;
    std::string worst;
    for (const auto& run : d.runs) {
        g_max_principle.record("disk seed " + std::to_string(run.seed), run.max_principle);
        for (const auto& r : run.envelope) {
            ++rows;
            if (!r.within) {
                ok = false;
                worst += " seed" + std::to_string(run.seed) + ":t=" + std::to_string(r.t);
            }
        }
    }
    const auto& r0 = d.runs.front().envelope;
    std::vector<double> h, up, lo;
    for (const auto& r : r0) {
        h.push_back(r.h);
        up.push_back(r.upper);
        lo.push_back(r.lower);
    }
    return {ok && rows == 15 && secs <= 180.0,
            std::to_string(rows) + " (seed, t) rows checked, Gamma/a = " + fmt(d.bounds.gamma / d.bounds.a) +
                "; seed 1 h(t) = " + list(h) + " vs upper " + list(up) + (ok ? "" : "; outside:" + worst)};
}

Outcome criterion_7() {
    const auto& d = disk();
    bool in_bounds = true;
    std::vector<double> supp;
    for (const auto& run : d.runs) {
        const auto& s = run.support;
        const double bw = run.profile.width();
        in_bounds = in_bounds && !s.degenerate && s.r_supp_empirical >= s.r_l - bw && s.r_supp_empirical <= s.r_u + bw;
        supp.push_back(s.r_supp_empirical);
    }
    std::vector<double> sweep;
    for (const auto& run : d.sweep) {
        sweep.push_back(run.support.r_supp_empirical);
        g_max_principle.record("disk sweep rho=" + fmt(run.rho_g), run.max_principle);
    }
    const auto& s0 = d.runs.front().support;
    return {in_bounds && strictly_decreasing(sweep) && sweep.size() == 3,
            "r_supp " + list(supp) + " in [r_l, r_u] = [" + fmt(s0.r_l) + ", " + fmt(s0.r_u) + "] +- bin; rho sweep x{0.25,1,4}: " +
                list(sweep)};
}

// criterion 8 and max-principle checks for pm reuse the same runs
Outcome criterion_8() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = experiments::er_compare({2048, 8192, 32768}, 1,
                                             {BaselineMethod::pm, BaselineMethod::region_er, BaselineMethod::point_er});
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::vector<double> frac;
    for (std::size_t k = 0; k < 3; ++k) frac.push_back(res.run(BaselineMethod::point_er, k).large_fraction);
    for (std::size_t k = 0; k < 3; ++k)
        g_max_principle.record("pm n=" + std::to_string(res.n_list[k]), res.run(BaselineMethod::pm, k).max_principle);
    const auto region = res.successive_sup(BaselineMethod::region_er);
    const auto pm = res.successive_sup(BaselineMethod::pm);
    const bool ok = strictly_decreasing(frac) && strictly_decreasing(region) && strictly_decreasing(pm) && secs <= 600.0;
    return {ok, "point-ER large fraction " + list(frac) + "; region-ER sup " + list(region) + "; PM sup " + list(pm) +
                    "; " + fmt(secs, 3) + " s"};
}

Outcome criterion_9() {
    const auto t0 = std::chrono::steady_clock::now();
    experiments::InjectivityConfig cfg;
    const auto res = experiments::sphere_injectivity(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    g_max_principle.record("sphere injectivity", res.max_principle);
    return {res.report.violations.empty() && res.report.pairs_tested == 100000 && secs <= 120.0,
            std::to_string(res.report.violations.size()) + " violations over " +
                std::to_string(res.report.pairs_tested) + " pairs (" + std::to_string(res.report.far_pairs) +
                " far), epsilon = " + fmt(res.epsilon) + ", min margin = " + fmt(res.report.min_margin)};
}

Outcome criterion_10() {
    const auto t0 = std::chrono::steady_clock::now();
    experiments::SphereEmbeddingConfig cfg;
    const auto res = experiments::sphere_embedding(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    g_max_principle.record("sphere embedding", res.max_principle);
    bool ok = secs <= 600.0;
    for (std::size_t k = 1; k < res.median_error.size(); ++k) ok = ok && res.median_error[k] <= res.median_error[k - 1];
    return {ok, "median Procrustes error for m = 3,5,7,9: " + list(res.median_error) + ", " + fmt(secs, 3) + " s"};
}

// ---- 11: rerun every command from its manifest ---------------------------------

int sh(const std::string& cmd) {
    const int rc = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

Outcome criterion_11() {
    const fs::path root = fs::temp_directory_path() / "gvolt_acceptance_determinism";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string tool = GVOLT_TOOL_PATH;
    const std::string pts = (root / "sample" / "points.csv").string();
    const std::string volt = (root / "solve" / "voltage.csv").string();
    const std::string disk = (root / "disk_solve" / "voltage.csv").string();
    const std::string disk_pts = (root / "disk_sample" / "points.csv").string();
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"sample", "sample --manifold unit_square --n 1500 --seed 3"},
        {"build", "build --points " + pts + " --bandwidth 0.06 --rho-g 0.02"},
        {"solve", "solve --points " + pts + " --bandwidth 0.06 --rho-g 0.02 --source-center 0.5,0.5 --source-radius 0.06"},
        {"solve_localized", "solve --points " + pts + " --bandwidth 0.06 --rho-g 0.02 --source-center 0.5,0.5 --source-radius 0.06 --mode localized --tau 0.001"},
        {"baseline_pm", "baseline --points " + pts + " --bandwidth 0.06 --source-center 0.1,0.1 --source-radius 0.1 --sink-center 0.7,0.7 --sink-radius 0.1 --method pm"},
        {"baseline_region", "baseline --points " + pts + " --bandwidth 0.06 --source-center 0.1,0.1 --source-radius 0.1 --sink-center 0.7,0.7 --sink-radius 0.1 --method region-er"},
        {"baseline_density", "baseline --points " + pts + " --bandwidth 0.06 --source-center 0.1,0.1 --source-radius 0.1 --sink-center 0.7,0.7 --sink-radius 0.1 --method density-er"},
        {"baseline_er", "baseline --points " + pts + " --bandwidth 0.06 --source-center 0.1,0.1 --source-radius 0.1 --sink-center 0.7,0.7 --sink-radius 0.1 --method er"},
        {"embed", "embed --manifold sphere --n 1500 --seed 2 --bandwidth 0.3 --rho-g 0.002 --landmarks 5 --project 3 --threads 2"},
        {"embed_fps", "embed --points " + pts + " --bandwidth 0.08 --rho-g 0.01 --landmarks 4 --strategy farthest_point --seed 5 --project 2"},
        {"profile", "analyze profile --points " + pts + " --voltage " + volt + " --source-center 0.5,0.5 --source-radius 0.06 --bins 20"},
        {"disk_sample", "sample --manifold disk --n 4096 --seed 1"},
        {"disk_solve", "solve --manifold disk --points " + disk_pts + " --bandwidth 0.05 --rho-g 0.00785398 --source-center 0,0 --source-radius 0.05"},
        {"bounds", "analyze bounds --manifold disk --bandwidth 0.05 --rho-g 0.00785398 --source-radius 0.05 --mc-samples 100000 --seed 4"},
        {"support", "analyze support --manifold disk --points " + disk_pts + " --voltage " + disk + " --bandwidth 0.05 --rho-g 0.00785398 --source-center 0,0 --source-radius 0.05 --mc-samples 100000"},
        {"convergence", "analyze convergence --manifold interval --lo 0 --hi 3 --bandwidth 0.05 --rho-g 0.01 --source-center 2.5 --source-radius 0.5 --n-list 256,512,1024 --seeds 1,2 --grid line --grid-lo 0 --grid-hi 3 --grid-count 50"},
        {"fig_er_compare", "repro fig_er_compare --n-list 2048,4096"},
        {"fig_voltage_grounded", "repro fig_voltage_grounded --n-list 256,512 --seeds 1,2"},
        {"fig_sphere_embedding", "repro fig_sphere_embedding --n 1024 --seeds 1"},
    };
    std::size_t files = 0;
    std::vector<std::string> problems;
    for (const auto& [name, args] : runs) {
        const fs::path first = root / name;
        const fs::path second = root / (name + "_rerun");
        if (sh(tool + " " + args + " -o " + first.string()) != 0) {
            problems.push_back(name + ": command failed");
            continue;
        }
        const auto manifest = first / "manifest.json";
        const std::string verb = args.substr(0, args.find(' '));
        if (sh(tool + " " + verb + " --config " + manifest.string() + " -o " + second.string()) != 0) {
            problems.push_back(name + ": rerun from manifest failed");
            continue;
        }
        std::size_t here = 0;
        for (const auto& entry : fs::directory_iterator(first)) {
            const auto ext = entry.path().extension();
            if (ext != ".csv" && ext != ".dat") continue;
            ++here;
            const auto twin = second / entry.path().filename();
            if (!fs::exists(twin) || io::read_text(entry.path()) != io::read_text(twin))
                problems.push_back(name + "/" + entry.path().filename().string() + " differs");
        }
        if (here == 0) problems.push_back(name + ": no CSV output");
        files += here;
    }
    std::string detail = std::to_string(runs.size()) + " commands, " + std::to_string(files) + " CSV/data files byte-identical on rerun";
    if (!problems.empty()) {
        detail = std::to_string(problems.size()) + " problems: " + problems.front();
        for (std::size_t k = 1; k < std::min<std::size_t>(problems.size(), 4); ++k) detail += "; " + problems[k];
    }
    return {problems.empty(), detail};
}

Outcome criterion_4() {
    const auto& m = g_max_principle;
    std::string detail = std::to_string(m.checked) + " voltage outputs checked";
    if (!m.failures.empty()) detail += "; failing: " + m.failures.front();
    return {m.failures.empty() && m.checked > 0, detail};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
    auto want = [&](int k) { return selected.empty() || selected.contains(k); };

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"oracle equivalence", criterion_1},
        {"closed-form fixtures", criterion_2},
        {"contraction certificate", criterion_3},
        {"maximum principle", criterion_4},
        {"convergence in n", criterion_5},
        {"decay envelopes", criterion_6},
        {"support radius", criterion_7},
        {"ER trivial limit", criterion_8},
        {"injectivity", criterion_9},
        {"embedding trend", criterion_10},
        {"determinism", criterion_11},
    };
    // criterion 4 aggregates over the others, so it runs last
    std::vector<int> order;
    for (int k = 1; k <= 11; ++k)
        if (k != 4) order.push_back(k);
    order.push_back(4);

    std::vector<std::string> lines(12);
    bool all = true;
    for (int k : order) {
        if (!want(k)) continue;
        if (k == 4 && selected.size() == 1) {
            // alone, criterion 4 needs something to look at
            rgg_suite();
            criterion_2();
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(k - 1)].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        all = all && o.pass;
        char head[96];
        std::snprintf(head, sizeof head, "%s criterion %2d %-24s", o.pass ? "PASS" : "FAIL", k,
                      criteria[static_cast<std::size_t>(k - 1)].first.c_str());
        lines[static_cast<std::size_t>(k)] = std::string(head) + " " + o.detail + " [" + fmt(secs, 3) + " s]";
        std::fprintf(stderr, "%s\n", lines[static_cast<std::size_t>(k)].c_str());
    }
    for (int k = 1; k <= 11; ++k)
        if (!lines[static_cast<std::size_t>(k)].empty()) std::printf("%s\n", lines[static_cast<std::size_t>(k)].c_str());
    return all ? 0 : 1;
}
