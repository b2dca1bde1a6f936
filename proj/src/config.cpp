#include "relmech/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "relmech/errors.hpp"

namespace relmech {

namespace {

using nlohmann::json;

struct Violations {
    std::vector<std::string> paths;
    std::vector<std::string> msgs;

    void add(const std::string& path, const std::string& msg) {
        paths.push_back(path);
        msgs.push_back(msg);
    }
    bool empty() const { return paths.empty(); }

    [[noreturn]] void raise() const {
        if (paths.size() == 1) throw SchemaError(paths[0], msgs[0]);
        std::string all = msgs[0];
        all += " (and " + std::to_string(paths.size() - 1) + " more:";
        for (std::size_t i = 1; i < paths.size(); ++i) all += " [" + paths[i] + ": " + msgs[i] + "]";
        all += ")";
        throw SchemaError(paths[0], all);
    }
};

// One JSON object scope: typed field extraction with range checks, and
// unknown-key detection for everything not consumed.
class Scope {
  public:
    Scope(const json& node, std::string path, Violations& v)
        : node_(node), path_(std::move(path)), v_(v) {}

    ~Scope() {
        for (const auto& item : node_.items())
            if (!seen_.count(item.key())) v_.add(join(item.key()), "unknown key");
    }

    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

    bool has(const char* key) {
        seen_.insert(key);
        return node_.contains(key);
    }

    const json* child_object(const char* key) {
        if (!has(key)) return nullptr;
        const json& c = node_.at(key);
        if (!c.is_object()) {
            v_.add(join(key), "expected an object");
            return nullptr;
        }
        return &c;
    }

    void number(const char* key, double& out, double lo, double hi, const char* why,
                bool allow_inf_string = false) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (allow_inf_string && c.is_string()) {
            const std::string s = c.get<std::string>();
            if (s == "inf" || s == "Infinity") {
                out = std::numeric_limits<double>::infinity();
                return;
            }
            v_.add(join(key), "expected a number or \"inf\"");
            return;
        }
        if (!c.is_number()) {
            v_.add(join(key), "expected a number");
            return;
        }
        const double x = c.get<double>();
        if (std::isnan(x) || x < lo || x > hi) {
            v_.add(join(key), why);
            return;
        }
        out = x;
    }

    void integer(const char* key, int& out, long lo, long hi, const char* why) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (!c.is_number_integer()) {
            v_.add(join(key), "expected an integer");
            return;
        }
        const long x = c.get<long>();
        if (x < lo || x > hi) {
            v_.add(join(key), why);
            return;
        }
        out = static_cast<int>(x);
    }

    void seed(const char* key, std::uint64_t& out) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (c.is_number_unsigned()) {
            out = c.get<std::uint64_t>();
            return;
        }
        if (c.is_number_integer()) {
            const long long x = c.get<long long>();
            if (x >= 0) {
                out = static_cast<std::uint64_t>(x);
                return;
            }
        }
        v_.add(join(key), "expected a non-negative integer");
    }

    void boolean(const char* key, bool& out) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (!c.is_boolean()) {
            v_.add(join(key), "expected true or false");
            return;
        }
        out = c.get<bool>();
    }

    void text(const char* key, std::string& out, const std::set<std::string>& allowed) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (!c.is_string()) {
            v_.add(join(key), "expected a string");
            return;
        }
        const std::string s = c.get<std::string>();
        if (!allowed.empty() && !allowed.count(s)) {
            std::string opts = "expected one of:";
            for (const std::string& a : allowed) opts += " " + a;
            v_.add(join(key), opts);
            return;
        }
        out = s;
    }

    void free_text(const char* key, std::string& out) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (!c.is_string()) {
            v_.add(join(key), "expected a string");
            return;
        }
        out = c.get<std::string>();
    }

    void positive_array(const char* key, std::vector<double>& out, const char* why,
                        bool allow_inf_string = false) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (!c.is_array() || c.empty()) {
            v_.add(join(key), "expected a non-empty array");
            return;
        }
        std::vector<double> vals;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const json& e = c[i];
            const std::string at = join(key) + "[" + std::to_string(i) + "]";
            if (allow_inf_string && e.is_string() &&
                (e.get<std::string>() == "inf" || e.get<std::string>() == "Infinity")) {
                vals.push_back(std::numeric_limits<double>::infinity());
                continue;
            }
            if (!e.is_number()) {
                v_.add(at, allow_inf_string ? "expected a number or \"inf\"" : "expected a number");
                return;
            }
            const double x = e.get<double>();
            if (!(x > 0.0) || std::isnan(x)) {
                v_.add(at, why);
                return;
            }
            vals.push_back(x);
        }
        out = std::move(vals);
    }

    void vec3_array(const char* key, std::vector<Vec3>& out) {
        if (!has(key)) return;
        const json& c = node_.at(key);
        if (!c.is_array() || c.empty()) {
            v_.add(join(key), "expected a non-empty array of [x, y, z] triples");
            return;
        }
        std::vector<Vec3> vals;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const json& e = c[i];
            const std::string at = join(key) + "[" + std::to_string(i) + "]";
            if (!e.is_array() || e.size() != 3) {
                v_.add(at, "expected an [x, y, z] triple");
                return;
            }
            Vec3 vecv;
            for (int k = 0; k < 3; ++k) {
                if (!e[k].is_number() || !std::isfinite(e[k].get<double>())) {
                    v_.add(at, "components must be finite numbers");
                    return;
                }
                vecv[k] = e[k].get<double>();
            }
            vals.push_back(vecv);
        }
        out = std::move(vals);
    }

    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

  private:
    const json& node_;
    std::string path_;
    Violations& v_;
    std::set<std::string> seen_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBig = 1e12;

void parse_constants(const json& node, ConstantsBlock& out, Violations& v) {
    Scope s(node, "constants", v);
    s.number("G", out.G, 1e-300, kBig, "G must be positive");
    s.number("hbar", out.hbar, 1e-300, kBig, "hbar must be positive");
}

void parse_output(const json& node, OutputBlock& out, Violations& v) {
    Scope s(node, "output", v);
    s.free_text("directory", out.directory);
    if (out.directory.empty()) v.add("output.directory", "must not be empty");
    s.free_text("prefix", out.prefix);
    if (out.prefix.find('/') != std::string::npos)
        v.add("output.prefix", "must not contain '/'");
    s.text("trajectory_format", out.trajectory_format, {"csv", "jsonl", "both"});
}

void parse_classical(const json& node, ClassicalBlock& out, Violations& v) {
    Scope s(node, "classical", v);
    s.positive_array("masses", out.masses, "mass must be positive");
    s.vec3_array("positions", out.positions);
    s.vec3_array("velocities", out.velocities);
    s.text("potential", out.potential, {"gravity", "harmonic", "none"});
    s.number("spring_k", out.spring_k, 1e-300, kBig, "spring_k must be positive");
    s.number("dt", out.dt, 1e-300, kBig, "dt must be positive");
    s.integer("steps", out.steps, 0, 100000000, "steps must be in [0, 1e8]");
    s.integer("sample_every", out.sample_every, 1, 100000000, "sample_every must be >= 1");
    s.integer("gauge_paths", out.gauge_paths, 1, 100000, "gauge_paths must be in [1, 1e5]");
    s.integer("gauge_trajectories", out.gauge_trajectories, 1, 1000,
              "gauge_trajectories must be in [1, 1000]");
    s.number("gauge_scale", out.gauge_scale, 1e-300, kBig, "gauge_scale must be positive");
    if (out.positions.size() != out.masses.size())
        v.add("classical.positions",
              "expected " + std::to_string(out.masses.size()) + " entries to match masses");
    if (out.velocities.size() != out.masses.size())
        v.add("classical.velocities",
              "expected " + std::to_string(out.masses.size()) + " entries to match masses");
}

void parse_bucket(const json& node, BucketBlock& out, Violations& v) {
    Scope s(node, "bucket", v);
    s.number("m", out.m, 1e-300, kBig, "m must be positive");
    s.number("R", out.R, 1e-300, kBig, "R must be positive");
    s.number("I0", out.I0, 1e-300, kInf, "I0 must be positive", /*allow_inf_string=*/true);
    s.positive_array("I0_values", out.I0_values, "I0 values must be positive",
                     /*allow_inf_string=*/true);
    s.integer("n_shell", out.n_shell, 3, 100000, "n_shell must be in [3, 1e5]");
    s.number("R_s", out.R_s, 1e-300, kBig, "R_s must be positive");
    s.number("dt", out.dt, 1e-300, kBig, "dt must be positive");
    s.integer("steps", out.steps, 1, 100000000, "steps must be in [1, 1e8]");
    s.boolean("ring_gravity", out.ring_gravity);
    s.integer("record_every", out.record_every, 1, 100000000, "record_every must be >= 1");
}

void parse_quantum(const json& node, QuantumBlock& out, Violations& v) {
    Scope s(node, "quantum", v);
    s.integer("n", out.n, 16, 16384, "n must be in [16, 16384]");
    s.number("half_width", out.half_width, 1e-300, kBig, "half_width must be positive");
    s.number("m1", out.m1, 1e-300, kBig, "m1 must be positive");
    s.number("m2", out.m2, 1e-300, kBig, "m2 must be positive");
    s.number("background_inertia", out.background_inertia, 0.0, kBig,
             "background_inertia must be non-negative");
    s.number("eps_soft", out.eps_soft, -kBig, kBig, "eps_soft out of range");
    s.boolean("machian_terms", out.machian_terms);
    s.text("potential", out.potential, {"none", "harmonic", "gravity"});
    s.number("spring_k", out.spring_k, 1e-300, kBig, "spring_k must be positive");
    s.number("cx", out.cx, -kBig, kBig, "cx out of range");
    s.number("cy", out.cy, -kBig, kBig, "cy out of range");
    s.number("sigma", out.sigma, 1e-300, kBig, "sigma must be positive");
    s.number("kx", out.kx, -kBig, kBig, "kx out of range");
    s.number("ky", out.ky, -kBig, kBig, "ky out of range");
    s.number("dt", out.dt, 1e-300, kBig, "dt must be positive");
    s.integer("steps", out.steps, 0, 100000000, "steps must be in [0, 1e8]");
    s.text("mode", out.mode, {"composed", "truncated"});
    s.text("propagator", out.propagator, {"crank_nicolson", "rk4"});
    s.number("solver_tol", out.solver_tol, 1e-300, 1.0, "solver_tol must be in (0, 1]");
    s.integer("record_every", out.record_every, 0, 100000000, "record_every must be >= 0");
    s.integer("snapshot_every", out.snapshot_every, 0, 100000000, "snapshot_every must be >= 0");
    s.boolean("snapshot_final", out.snapshot_final);
}

ScenarioConfig parse_root(const json& root, const std::string& origin) {
    if (!root.is_object())
        throw SchemaError("", origin + ": top level must be a JSON object");

    Violations v;
    ScenarioConfig cfg;

    bool kind_known = false;
    {
        Scope s(root, "", v);
        std::string kind;
        if (!s.has("scenario")) {
            v.add("scenario", "required key is missing");
        } else {
            s.text("scenario", kind,
                   {"classical_run", "gauge_check", "bucket_analytic", "bucket_sweep",
                    "bucket_sim", "quantum_evolve", "quantum_checks", "invariant_suite"});
            if (!kind.empty()) {
                cfg.scenario = scenario_kind_from_string(kind);
                kind_known = true;
            }
        }
        s.seed("seed", cfg.seed);
        if (const json* c = s.child_object("constants")) parse_constants(*c, cfg.constants, v);
        if (const json* c = s.child_object("output")) parse_output(*c, cfg.output, v);

        const bool classical_ok = cfg.scenario == ScenarioKind::ClassicalRun ||
                                  cfg.scenario == ScenarioKind::GaugeCheck;
        const bool bucket_ok = cfg.scenario == ScenarioKind::BucketAnalytic ||
                               cfg.scenario == ScenarioKind::BucketSweep ||
                               cfg.scenario == ScenarioKind::BucketSim;
        const bool quantum_ok = cfg.scenario == ScenarioKind::QuantumEvolve;

        if (const json* c = s.child_object("classical")) {
            if (kind_known && !classical_ok)
                v.add("classical", "block not used by scenario " + to_string(cfg.scenario));
            else
                parse_classical(*c, cfg.classical, v);
        }
        if (const json* c = s.child_object("bucket")) {
            if (kind_known && !bucket_ok)
                v.add("bucket", "block not used by scenario " + to_string(cfg.scenario));
            else
                parse_bucket(*c, cfg.bucket, v);
        }
        if (const json* c = s.child_object("quantum")) {
            if (kind_known && !quantum_ok)
                v.add("quantum", "block not used by scenario " + to_string(cfg.scenario));
            else
                parse_quantum(*c, cfg.quantum, v);
        }
    }

    if (!v.empty()) v.raise();
    return cfg;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::ClassicalRun: return "classical_run";
        case ScenarioKind::GaugeCheck: return "gauge_check";
        case ScenarioKind::BucketAnalytic: return "bucket_analytic";
        case ScenarioKind::BucketSweep: return "bucket_sweep";
        case ScenarioKind::BucketSim: return "bucket_sim";
        case ScenarioKind::QuantumEvolve: return "quantum_evolve";
        case ScenarioKind::QuantumChecks: return "quantum_checks";
        case ScenarioKind::InvariantSuite: return "invariant_suite";
    }
    return "unknown";
}

ScenarioKind scenario_kind_from_string(const std::string& name) {
    if (name == "classical_run") return ScenarioKind::ClassicalRun;
    if (name == "gauge_check") return ScenarioKind::GaugeCheck;
    if (name == "bucket_analytic") return ScenarioKind::BucketAnalytic;
    if (name == "bucket_sweep") return ScenarioKind::BucketSweep;
    if (name == "bucket_sim") return ScenarioKind::BucketSim;
    if (name == "quantum_evolve") return ScenarioKind::QuantumEvolve;
    if (name == "quantum_checks") return ScenarioKind::QuantumChecks;
    if (name == "invariant_suite") return ScenarioKind::InvariantSuite;
    throw SchemaError("scenario", "unknown scenario kind: " + name);
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open config: " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), path);
}

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
    return parse_root(root, origin);
}

}  // namespace relmech
