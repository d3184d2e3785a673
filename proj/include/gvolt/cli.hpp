#pragma once

#include "gvolt/embedding.hpp"
#include "gvolt/er.hpp"
#include "gvolt/graph.hpp"
#include "gvolt/manifold.hpp"
#include "gvolt/solver.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gvolt::cli {

using json = nlohmann::json;

inline constexpr const char* kVersion = "0.1.0";
/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "GVOLT_OUTPUT_DIR";

struct Region {
    std::vector<double> center;      // empty when given by nodes
    double radius = 0.0;
    std::vector<std::size_t> nodes;  // explicit node indices (graph-only inputs)
};

struct Grid {
    std::string kind = "line";  // line | square | diagonal
    double lo = 0.0;
    double hi = 1.0;
    std::size_t count = 50;
};

struct LandmarkOptions {
    std::size_t m = 0;
    LandmarkStrategy strategy = LandmarkStrategy::uniform_random;
    std::optional<double> radius_s;  // defaults to the kernel bandwidth
    int project = 0;                 // MDS dimension, 0 = none
    unsigned threads = 1;
};

struct AnalysisOptions {
    std::size_t n_bins = 40;
    double tau = 0.01;
    int t_max = 5;
    std::size_t mc_samples = 1'000'000;
    std::vector<std::size_t> n_list;
    std::vector<std::uint64_t> seeds;
    Grid grid;
    unsigned threads = 1;
};

struct Inputs {
    std::string points;   // points CSV
    std::string graph;    // edge-list CSV
    std::string voltage;  // voltage CSV
    std::string subset;   // index file
};

/// Everything a command needs. Serialized verbatim into each manifest, so a
/// manifest is itself a valid --config.
struct RunConfig {
    std::string command;   // sample | build | solve | baseline | embed | analyze | repro
    std::string analysis;  // profile | bounds | support | convergence
    std::string figure;    // fig_er_compare | fig_voltage_grounded | fig_sphere_embedding
    ManifoldSpec manifold = ManifoldSpec::interval(0.0, 1.0);
    bool has_manifold = false;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    KernelSpec kernel;
    double rho_g = 1.0;
    GraphOptions graph_options;
    std::optional<Region> source;
    std::optional<Region> sink;
    SolverConfig solver;
    BaselineMethod method = BaselineMethod::pm;
    LandmarkOptions landmarks;
    AnalysisOptions analysis_options;
    Inputs inputs;
    std::string output_dir;
};

/// Spec with the documented defaults for a kind name ("disk" is the
/// unit-area 2-ball; sphere kinds default to S^2, segments to azimuth [0, pi]).
ManifoldSpec default_manifold(const std::string& name);

json to_json(const RunConfig& cfg);
/// Strict parse: unknown keys and type errors throw ValidationError naming
/// the JSON path (e.g. "config.solver.tol"). Accepts either a bare config
/// object or a manifest (whose "config" member is used).
RunConfig config_from_json(const json& doc);

/// Entry point; returns the process exit code (0 ok, 1 validation, 2 numerical).
int run(int argc, char** argv);

}  // namespace gvolt::cli
