#include "gvolt/cli.hpp"

#include "gvolt/errors.hpp"

#include <cmath>
#include <numbers>
#include <set>

namespace gvolt::cli {

namespace {

/// Walks one JSON object, remembering which keys were read so leftovers can
/// be reported as unknown.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) fail(path_, "expected an object");
    }

    [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
        throw ValidationError(path + ": " + msg);
    }

    [[nodiscard]] std::string at(const std::string& key) const { return path_ + "." + key; }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() || it->is_null() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out) {
        if (auto* v = find(key)) {
            if (!v->is_number()) fail(at(key), "expected a number");
            out = v->get<double>();
        }
    }
    void boolean(const std::string& key, bool& out) {
        if (auto* v = find(key)) {
            if (!v->is_boolean()) fail(at(key), "expected true or false");
            out = v->get<bool>();
        }
    }
    template <class U>
    void unsigned_int(const std::string& key, U& out) {
        if (auto* v = find(key)) out = as_unsigned<U>(*v, at(key));
    }
    void integer(const std::string& key, int& out) {
        if (auto* v = find(key)) {
            if (!v->is_number_integer()) fail(at(key), "expected an integer");
            out = v->get<int>();
        }
    }
    void string(const std::string& key, std::string& out) {
        if (auto* v = find(key)) {
            if (!v->is_string()) fail(at(key), "expected a string");
            out = v->get<std::string>();
        }
    }
    void numbers(const std::string& key, std::vector<double>& out) {
        if (auto* v = find(key)) {
            if (!v->is_array()) fail(at(key), "expected an array of numbers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back((*v)[i].get<double>());
            }
        }
    }
    template <class U>
    void unsigned_list(const std::string& key, std::vector<U>& out) {
        if (auto* v = find(key)) {
            if (!v->is_array()) fail(at(key), "expected an array of non-negative integers");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
                out.push_back(as_unsigned<U>((*v)[i], at(key) + "[" + std::to_string(i) + "]"));
        }
    }

    void finish() const {
        for (const auto& [key, _] : obj_.items())
            if (!seen_.contains(key)) fail(at(key), "unknown key");
    }

private:
    template <class U>
    static U as_unsigned(const json& v, const std::string& path) {
        if (v.is_number_unsigned()) return static_cast<U>(v.get<std::uint64_t>());
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<U>(v.get<std::int64_t>());
        fail(path, "expected a non-negative integer");
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class F>
auto with_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ValidationError& e) {
        std::string msg = e.what();
        if (msg.rfind(path, 0) == 0) throw;
        throw ValidationError(path + ": " + msg);
    }
}

json region_json(const Region& r) {
    return {{"center", r.center}, {"radius", r.radius}, {"nodes", r.nodes}};
}

Region region_from(const json& v, const std::string& path) {
    Section s(v, path);
    Region r;
    s.numbers("center", r.center);
    s.number("radius", r.radius);
    s.unsigned_list("nodes", r.nodes);
    s.finish();
    if (!r.center.empty() && !(r.radius >= 0.0)) Section::fail(path + ".radius", "must be >= 0");
    return r;
}

}  // namespace

ManifoldSpec default_manifold(const std::string& name) {
    using K = ManifoldSpec::Kind;
    if (name == "disk") return ManifoldSpec::unit_volume_ball(2);
    switch (manifold_kind_from_string(name)) {
        case K::interval: return ManifoldSpec::interval(0.0, 1.0);
        case K::unit_square: return ManifoldSpec::unit_square();
        case K::sphere: return ManifoldSpec::sphere(3);
        case K::sphere_segment: return ManifoldSpec::sphere_segment(3, 0.0, std::numbers::pi);
        case K::ball: return ManifoldSpec::unit_volume_ball(3);
        case K::external: return ManifoldSpec::external(2);
    }
    return {};
}

json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["analysis"] = c.analysis;
    j["figure"] = c.figure;
    if (c.has_manifold) {
        j["manifold"] = {{"kind", to_string(c.manifold.kind)}, {"lo", c.manifold.lo},
                         {"hi", c.manifold.hi}, {"dim", c.manifold.dim},
                         {"azimuth_lo", c.manifold.azimuth_lo}, {"azimuth_hi", c.manifold.azimuth_hi},
                         {"radius", c.manifold.radius}};
    } else {
        j["manifold"] = nullptr;
    }
    j["n"] = c.n;
    j["seed"] = c.seed;
    j["kernel"] = {{"kind", to_string(c.kernel.kind)}, {"bandwidth", c.kernel.bandwidth},
                   {"gaussian_cutoff", c.graph_options.gaussian_cutoff},
                   {"cutoff_sigmas", c.graph_options.cutoff_sigmas}};
    j["rho_g"] = c.rho_g;
    j["source"] = c.source ? region_json(*c.source) : json(nullptr);
    j["sink"] = c.sink ? region_json(*c.sink) : json(nullptr);
    j["solver"] = {{"tol", c.solver.tol}, {"max_iters", c.solver.max_iters},
                   {"mode", to_string(c.solver.mode)}, {"tau", c.solver.tau}};
    j["baseline"] = {{"method", to_string(c.method)}};
    j["landmarks"] = {{"m", c.landmarks.m}, {"strategy", to_string(c.landmarks.strategy)},
                      {"radius_s", c.landmarks.radius_s ? json(*c.landmarks.radius_s) : json(nullptr)},
                      {"project", c.landmarks.project}, {"threads", c.landmarks.threads}};
    const auto& a = c.analysis_options;
    j["analysis_options"] = {{"n_bins", a.n_bins}, {"tau", a.tau}, {"t_max", a.t_max},
                             {"mc_samples", a.mc_samples}, {"n_list", a.n_list}, {"seeds", a.seeds},
                             {"grid", {{"kind", a.grid.kind}, {"lo", a.grid.lo}, {"hi", a.grid.hi}, {"count", a.grid.count}}},
                             {"threads", a.threads}};
    j["inputs"] = {{"points", c.inputs.points}, {"graph", c.inputs.graph},
                   {"voltage", c.inputs.voltage}, {"subset", c.inputs.subset}};
    j["output_dir"] = c.output_dir;
    return j;
}

RunConfig config_from_json(const json& doc) {
    std::string root = "config";
    const json* body = &doc;
    if (doc.is_object() && doc.contains("manifest_version")) {
        // a manifest: only its config section matters
        if (!doc.contains("config")) Section::fail("manifest", "missing config section");
        body = &doc.at("config");
        root = "manifest.config";
    }
    Section s(*body, root);
    RunConfig c;
    s.string("command", c.command);
    s.string("analysis", c.analysis);
    s.string("figure", c.figure);
    if (auto* m = s.find("manifold")) {
        Section ms(*m, s.at("manifold"));
        std::string kind;
        ms.string("kind", kind);
        if (kind.empty()) Section::fail(s.at("manifold.kind"), "required");
        c.manifold = with_path(s.at("manifold.kind"), [&] { return default_manifold(kind); });
        ms.number("lo", c.manifold.lo);
        ms.number("hi", c.manifold.hi);
        ms.integer("dim", c.manifold.dim);
        ms.number("azimuth_lo", c.manifold.azimuth_lo);
        ms.number("azimuth_hi", c.manifold.azimuth_hi);
        ms.number("radius", c.manifold.radius);
        ms.finish();
        if (c.manifold.kind == ManifoldSpec::Kind::ball && (!m->contains("radius") || (*m)["radius"].is_null()))
            c.manifold = ManifoldSpec::unit_volume_ball(c.manifold.dim);
        with_path(s.at("manifold"), [&] { c.manifold.validate(); return 0; });
        c.has_manifold = true;
    }
    s.unsigned_int("n", c.n);
    s.unsigned_int("seed", c.seed);
    if (auto* k = s.find("kernel")) {
        Section ks(*k, s.at("kernel"));
        std::string kind = to_string(c.kernel.kind);
        ks.string("kind", kind);
        c.kernel.kind = with_path(s.at("kernel.kind"), [&] { return kernel_kind_from_string(kind); });
        ks.number("bandwidth", c.kernel.bandwidth);
        ks.boolean("gaussian_cutoff", c.graph_options.gaussian_cutoff);
        ks.number("cutoff_sigmas", c.graph_options.cutoff_sigmas);
        ks.finish();
        if (!(c.kernel.bandwidth > 0.0)) Section::fail(s.at("kernel.bandwidth"), "must be > 0");
    }
    s.number("rho_g", c.rho_g);
    if (!(c.rho_g >= 0.0) || !std::isfinite(c.rho_g)) Section::fail(s.at("rho_g"), "must be a finite number >= 0");
    if (auto* r = s.find("source")) c.source = region_from(*r, s.at("source"));
    if (auto* r = s.find("sink")) c.sink = region_from(*r, s.at("sink"));
    if (auto* v = s.find("solver")) {
        Section ss(*v, s.at("solver"));
        ss.number("tol", c.solver.tol);
        ss.unsigned_int("max_iters", c.solver.max_iters);
        std::string mode = to_string(c.solver.mode);
        ss.string("mode", mode);
        c.solver.mode = with_path(s.at("solver.mode"), [&] { return solver_mode_from_string(mode); });
        ss.number("tau", c.solver.tau);
        ss.finish();
        with_path(s.at("solver"), [&] { c.solver.validate(); return 0; });
    }
    if (auto* v = s.find("baseline")) {
        Section bs(*v, s.at("baseline"));
        std::string method = to_string(c.method);
        bs.string("method", method);
        c.method = with_path(s.at("baseline.method"), [&] { return baseline_method_from_string(method); });
        bs.finish();
    }
    if (auto* v = s.find("landmarks")) {
        Section ls(*v, s.at("landmarks"));
        ls.unsigned_int("m", c.landmarks.m);
        std::string strategy = to_string(c.landmarks.strategy);
        ls.string("strategy", strategy);
        c.landmarks.strategy = with_path(s.at("landmarks.strategy"), [&] { return landmark_strategy_from_string(strategy); });
        if (auto* rs = ls.find("radius_s")) {
            if (!rs->is_number()) Section::fail(s.at("landmarks.radius_s"), "expected a number");
            c.landmarks.radius_s = rs->get<double>();
        }
        ls.integer("project", c.landmarks.project);
        ls.unsigned_int("threads", c.landmarks.threads);
        ls.finish();
        if (c.landmarks.project < 0) Section::fail(s.at("landmarks.project"), "must be >= 0");
    }
    if (auto* v = s.find("analysis_options")) {
        Section as(*v, s.at("analysis_options"));
        auto& a = c.analysis_options;
        as.unsigned_int("n_bins", a.n_bins);
        as.number("tau", a.tau);
        as.integer("t_max", a.t_max);
        as.unsigned_int("mc_samples", a.mc_samples);
        as.unsigned_list("n_list", a.n_list);
        as.unsigned_list("seeds", a.seeds);
        if (auto* g = as.find("grid")) {
            Section gs(*g, s.at("analysis_options.grid"));
            gs.string("kind", a.grid.kind);
            gs.number("lo", a.grid.lo);
            gs.number("hi", a.grid.hi);
            gs.unsigned_int("count", a.grid.count);
            gs.finish();
            if (a.grid.kind != "line" && a.grid.kind != "square" && a.grid.kind != "diagonal")
                Section::fail(s.at("analysis_options.grid.kind"), "expected line, square or diagonal");
        }
        as.unsigned_int("threads", a.threads);
        as.finish();
    }
    if (auto* v = s.find("inputs")) {
        Section is(*v, s.at("inputs"));
        is.string("points", c.inputs.points);
        is.string("graph", c.inputs.graph);
        is.string("voltage", c.inputs.voltage);
        is.string("subset", c.inputs.subset);
        is.finish();
    }
    s.string("output_dir", c.output_dir);
    s.finish();
    return c;
}

}  // namespace gvolt::cli
