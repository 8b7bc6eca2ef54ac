#include "dbarlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "dbarlab/errors.hpp"

namespace dbarlab {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::solve: return "solve";
        case ExperimentKind::decay: return "decay";
        case ExperimentKind::avoid: return "avoid";
        case ExperimentKind::approx: return "approx";
        case ExperimentKind::constants: return "constants";
        case ExperimentKind::validate: return "validate";
    }
    return "?";
}

namespace {

ExperimentKind kind_from(const std::string& s) {
    for (auto k : {ExperimentKind::solve, ExperimentKind::decay, ExperimentKind::avoid, ExperimentKind::approx,
                   ExperimentKind::constants, ExperimentKind::validate}) {
        if (to_string(k) == s) return k;
    }
    throw ConfigError("config: key 'experiment' must be one of solve, decay, avoid, approx, constants, validate (got '" +
                      s + "')");
}

// A JSON object with its key path; remembers which keys were read so that
// unknown (misspelt) keys can be reported.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config: '" + (path_.empty() ? "<root>" : path_) + "' must be a table");
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    bool has(const std::string& k) const { return j_.contains(k); }

    const json& raw(const std::string& k) {
        seen_.insert(k);
        if (!j_.contains(k)) throw ConfigError("config: missing required key '" + key(k) + "'");
        return j_.at(k);
    }

    double number(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_number()) throw ConfigError("config: key '" + key(k) + "' must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError("config: key '" + key(k) + "' must be finite");
        return d;
    }
    double number(const std::string& k, double def) { return has(k) ? number(k) : (seen_.insert(k), def); }

    long integer(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_number_integer()) throw ConfigError("config: key '" + key(k) + "' must be an integer");
        return v.get<long>();
    }
    long integer(const std::string& k, long def) { return has(k) ? integer(k) : (seen_.insert(k), def); }

    bool boolean(const std::string& k, bool def) {
        if (!has(k)) return def;
        const json& v = raw(k);
        if (!v.is_boolean()) throw ConfigError("config: key '" + key(k) + "' must be true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_string()) throw ConfigError("config: key '" + key(k) + "' must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& k, const std::string& def) { return has(k) ? string(k) : def; }

    std::vector<double> numbers(const std::string& k) {
        const json& v = raw(k);
        if (!v.is_array()) throw ConfigError("config: key '" + key(k) + "' must be an array of numbers");
        std::vector<double> out;
        for (const json& e : v) {
            if (!e.is_number()) throw ConfigError("config: key '" + key(k) + "' must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    Section sub(const std::string& k) {
        raw(k);
        return Section(j_.at(k), key(k));
    }

    void reject_unknown() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("config: unknown key '" + key(it.key()) + "'");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

CPoint read_point(Section& s, const std::string& k, int n) {
    if (!s.has(k)) {
        s.raw(k);  // throws "missing"
    }
    const std::vector<double> v = s.numbers(k);
    if (static_cast<int>(v.size()) != 2 * n) {
        throw ConfigError("config: key '" + s.key(k) + "' needs " + std::to_string(2 * n) +
                          " real coordinates (x1, y1[, x2, y2])");
    }
    CPoint p{};
    for (int j = 0; j < n; ++j) p[j] = cplx(v[2 * j], v[2 * j + 1]);
    return p;
}

std::optional<BallSpec> read_ball(Section& geo, const std::string& k, int n) {
    if (!geo.has(k)) return std::nullopt;
    Section b = geo.sub(k);
    BallSpec out;
    out.center = b.has("center") ? read_point(b, "center", n) : CPoint{};
    out.radius = b.number("radius");
    if (!(out.radius > 0.0)) throw ConfigError("config: key '" + b.key("radius") + "' must be positive");
    b.reject_unknown();
    return out;
}

json point_json(const CPoint& p, int n) {
    json a = json::array();
    for (int j = 0; j < n; ++j) {
        a.push_back(p[j].real());
        a.push_back(p[j].imag());
    }
    return a;
}

double dist(const CPoint& a, const CPoint& b, int n) {
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += std::norm(a[j] - b[j]);
    return std::sqrt(s);
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError("config: " + msg);
}

void cross_check(const ExperimentConfig& c) {
    const Grid g = c.grid();
    (void)c.weight();
    require(c.threads >= 1, "key 'threads' must be >= 1");
    const int q = c.data.degree;
    require(q >= 1 && q <= c.n, "key 'data.degree' must lie in [1, grid.n]");
    require(c.data.kind == "dbar-potential" || c.data.kind == "gaussian-envelope" || c.data.kind == "zero",
            "key 'data.kind' must be dbar-potential, gaussian-envelope or zero");
    if (c.data.kind == "dbar-potential") require(c.data.outer > c.data.inner && c.data.inner >= 0.0,
                                                 "keys 'data.inner' < 'data.outer' required (inner >= 0)");
    require(c.data.gauss >= 0.0, "key 'data.gauss' must be non-negative");
    require(c.eps > 0.0, "key 'geometry.eps' must be positive");
    require(c.cutoff_scale > 0.0, "key 'geometry.cutoff_scale' must be positive");
    require(c.inner_tolerance > 0.0 && c.inner_tolerance < 1.0, "key 'solver.inner_tolerance' must lie in (0, 1)");
    c.solver.validate();

    switch (c.kind) {
        case ExperimentKind::decay:
        case ExperimentKind::constants:
            require(c.D.has_value(), "missing required key 'geometry.D'");
            require(!c.ks.empty(), "missing required key 'geometry.ks'");
            for (double k : c.ks) require(k >= 0.0, "key 'geometry.ks' must hold non-negative values");
            break;
        case ExperimentKind::avoid: {
            require(c.n == 2 && q == 2, "avoid experiments need grid.n = 2 and data.degree = 2");
            require(c.D && c.C && c.U, "avoid experiments need geometry.D, geometry.C and geometry.U");
            require(c.k >= 0.0, "key 'geometry.k' must be non-negative");
            const double gap = 3 * g.h();
            require(dist(c.U->center, c.C->center, 2) + c.U->radius + gap <= c.C->radius,
                    "geometry.U (closure) must lie inside geometry.C with a 3-cell margin");
            for (int j = 0; j < 2; ++j) {
                const double lim = c.R - c.C->radius - g.h();
                require(std::abs(c.C->center[j].real()) <= lim && std::abs(c.C->center[j].imag()) <= lim,
                        "geometry.C must lie inside the box with a one-cell margin");
            }
            break;
        }
        case ExperimentKind::approx:
            require(c.stages >= 1, "key 'geometry.stages' must be >= 1");
            require(c.duality_tests >= 0, "key 'geometry.duality_tests' must be non-negative");
            // r_K >= r_0 + K, and r_K + 1 < R is needed.
            require(c.r0.value_or(0.0) + c.stages + 1.0 < c.R,
                    "radius schedule cannot fit: r_0 + stages + 1 must be < grid.R");
            break;
        default: break;
    }
}

json toml_to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        json o = json::object();
        for (const auto& [k, v] : *t) o[std::string(k.str())] = toml_to_json(v);
        return o;
    }
    if (const auto* a = node.as_array()) {
        json arr = json::array();
        for (const auto& v : *a) arr.push_back(toml_to_json(v));
        return arr;
    }
    if (const auto* v = node.as_integer()) return v->get();
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    if (const auto* v = node.as_string()) return v->get();
    throw ConfigError("config: dates and times are not supported");
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
    json j;
    j["experiment"] = to_string(kind);
    j["name"] = name;
    j["seed"] = seed;
    j["threads"] = threads;
    j["grid"] = {{"n", n}, {"R", R}, {"N", N}};
    j["weight"] = {{"kind", weight_kind}, {"params", weight_params}};
    j["data"] = {{"kind", data.kind},       {"degree", data.degree}, {"center", point_json(data.center, n)},
                 {"inner", data.inner},     {"outer", data.outer},   {"gauss", data.gauss},
                 {"amplitude", data.amplitude}};
    json geo = {{"eps", eps}, {"cutoff_scale", cutoff_scale}, {"k", k}, {"stages", stages},
                {"duality_tests", duality_tests}, {"ks", ks}};
    if (r0) geo["r0"] = *r0;
    for (const auto& [key, ball] : {std::pair{"D", &D}, std::pair{"C", &C}, std::pair{"U", &U}}) {
        if (*ball) geo[key] = {{"center", point_json((*ball)->center, n)}, {"radius", (*ball)->radius}};
    }
    j["geometry"] = geo;
    j["solver"] = {{"tolerance", solver.tolerance},
                   {"max_iterations", solver.max_iterations},
                   {"shift", solver.shift},
                   {"trust_data", solver.trust_data},
                   {"allow_inexact", solver.allow_inexact},
                   {"residual_weight_cap", solver.residual_weight_cap},
                   {"orthogonality_degree", solver.orthogonality_degree},
                   {"inner_tolerance", inner_tolerance}};
    return j;
}

ExperimentConfig parse_config(const json& j) {
    Section root(j, "");
    ExperimentConfig c;
    c.kind = kind_from(root.string("experiment"));
    c.name = root.string("name", to_string(c.kind));
    c.seed = static_cast<std::uint64_t>(root.integer("seed", 1));
    c.threads = static_cast<int>(root.integer("threads", 1));
    c.out_dir = root.string("out_dir", "");

    Section grid = root.sub("grid");
    c.n = static_cast<int>(grid.integer("n"));
    c.R = grid.number("R");
    c.N = static_cast<int>(grid.integer("N"));
    grid.reject_unknown();
    if (c.n != 1 && c.n != 2) throw ConfigError("config: key 'grid.n' must be 1 or 2");
    try {
        (void)c.grid();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string("config: [grid] ") + e.what());
    }

    if (root.has("weight")) {
        Section w = root.sub("weight");
        c.weight_kind = w.string("kind");
        c.weight_params = w.has("params") ? w.numbers("params") : std::vector<double>{};
        w.reject_unknown();
        try {
            (void)c.weight();
        } catch (const ConfigError& e) {
            throw ConfigError(std::string("config: [weight] ") + e.what());
        }
    }

    if (root.has("data")) {
        Section d = root.sub("data");
        c.data.kind = d.string("kind", c.data.kind);
        c.data.degree = static_cast<int>(d.integer("degree", c.n == 2 && c.kind == ExperimentKind::avoid ? 2 : 1));
        if (d.has("center")) c.data.center = read_point(d, "center", c.n);
        c.data.inner = d.number("inner", c.data.inner);
        c.data.outer = d.number("outer", c.data.outer);
        c.data.gauss = d.number("gauss", c.data.gauss);
        c.data.amplitude = d.number("amplitude", c.data.amplitude);
        d.reject_unknown();
    }

    if (root.has("geometry")) {
        Section geo = root.sub("geometry");
        c.D = read_ball(geo, "D", c.n);
        c.C = read_ball(geo, "C", c.n);
        c.U = read_ball(geo, "U", c.n);
        c.eps = geo.number("eps", c.eps);
        c.cutoff_scale = geo.number("cutoff_scale", c.cutoff_scale);
        if (geo.has("ks")) c.ks = geo.numbers("ks");
        c.k = geo.number("k", c.k);
        c.stages = static_cast<int>(geo.integer("stages", c.stages));
        if (geo.has("r0")) c.r0 = geo.number("r0");
        c.duality_tests = static_cast<int>(geo.integer("duality_tests", c.duality_tests));
        geo.reject_unknown();
    }

    if (root.has("solver")) {
        Section s = root.sub("solver");
        c.solver.tolerance = s.number("tolerance", c.solver.tolerance);
        c.solver.max_iterations = s.integer("max_iterations", c.solver.max_iterations);
        c.solver.shift = s.number("shift", c.solver.shift);
        c.solver.verbosity = static_cast<int>(s.integer("verbosity", c.solver.verbosity));
        c.solver.trust_data = s.boolean("trust_data", c.solver.trust_data);
        c.solver.allow_inexact = s.boolean("allow_inexact", c.solver.allow_inexact);
        c.solver.residual_weight_cap = s.number("residual_weight_cap", c.solver.residual_weight_cap);
        c.solver.orthogonality_degree =
            static_cast<int>(s.integer("orthogonality_degree", c.solver.orthogonality_degree));
        c.inner_tolerance = s.number("inner_tolerance", c.inner_tolerance);
        s.reject_unknown();
    }
    root.reject_unknown();
    cross_check(c);
    return c;
}

json parse_toml(const std::string& text, const std::string& source) {
    try {
        const toml::table t = toml::parse(text, source);
        return toml_to_json(t);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "config: " << source << ":" << e.source().begin.line << ": " << e.description();
        throw ConfigError(msg.str());
    }
}

json read_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (path.extension() == ".json") {
        try {
            return json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("config: " + path.string() + ": " + e.what());
        }
    }
    return parse_toml(text, path.string());
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_config_file(path)); }

}  // namespace dbarlab
