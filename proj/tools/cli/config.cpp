#include "cli/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "torusflow/errors.hpp"
#include "torusflow/geometry.hpp"
#include "torusflow/shapes.hpp"

namespace torusflow::cli {

namespace {

struct Entry {
    const char* section;
    const char* key;
    const char* value;
    const char* doc;
};

// Every accepted key and its default. Acceptance tests pin these.
const Entry kDefaults[] = {
    {"geometry", "shape", "perturbed_circle", "circle | strip | lamellae | perturbed_circle | perturbed_strip | snapshot"},
    {"geometry", "r", "0.2", "circle radius"},
    {"geometry", "center_x", "0.5", ""},
    {"geometry", "center_y", "0.5", ""},
    {"geometry", "h", "0.5", "strip thickness (phase fraction)"},
    {"geometry", "offset", "0.25", "lower interface of a strip"},
    {"geometry", "angle", "0", "strip angle: 0, 90 or 45 (the (1,1) lattice direction)"},
    {"geometry", "k", "1", "number of strips for lamellae"},
    {"geometry", "mode", "2", "perturbation wavenumber"},
    {"geometry", "amplitude", "5e-3", "perturbation amplitude"},
    {"geometry", "markers", "128", "markers per loop"},
    {"geometry", "file", "", "snapshot file for shape = snapshot"},
    {"flow", "kind", "sd", "sd | ms"},
    {"flow", "gamma", "0", "nonlocal coefficient (forced to 0 for sd)"},
    {"flow", "scheme", "ssd", "ssd | rk4"},
    {"flow", "c_cfl", "0", "stiffness constant, 0 = default for the scheme (ssd 0.2 sd / 0.5 ms, rk4 0.02 / 0.04)"},
    {"flow", "t_end", "1e-4", ""},
    {"flow", "max_steps", "0", "0 = unbounded"},
    {"flow", "area_tol", "1e-7", ""},
    {"flow", "dt_min", "1e-16", ""},
    {"flow", "resample", "true", "equal-arclength resampling after each step"},
    {"flow", "enforce_volume", "true", ""},
    {"grid", "n", "256", "grid for the asymmetry distance"},
    {"monitor", "eps0", "inf", "C1 stopping threshold"},
    {"monitor", "delta0", "inf", "stop when dissipation >= 2 delta0"},
    {"monitor", "reference", "base", "base (unperturbed shape) | none"},
    {"stability", "gammas", "0", "comma separated gamma list"},
    {"stability", "n_modes", "0", "0 = min(16, markers / 4)"},
    {"stability", "rel_tol", "1e-6", "stab_tol = rel_tol * max |eigenvalue|"},
    {"stability", "threshold_k_max", "0", "k(gamma) sweep up to this many strips, 0 = off"},
    {"stability", "threshold_h", "0.5", ""},
    {"stability", "threshold_markers", "64", "markers per interface in the sweep"},
    {"verify", "steps", "200", "trajectory length for the first identity"},
    {"verify", "dt", "0", "virtual step for the second identities, 0 = adaptive_dt / 10"},
    {"verify", "trials", "3", "random trial functions for the quadratic-form consistency check"},
    {"sweep", "param", "flow.gamma", "key varied by the sweep command"},
    {"sweep", "values", "", "comma separated values"},
    {"sweep", "jobs", "1", "worker threads"},
    {"output", "dir", "torusflow_out", "outputs go to <dir>/<config hash>/"},
    {"output", "snapshot_every", "0", "0 = initial and final snapshots only"},
    {"output", "plots", "true", ""},
    {"output", "fit_from", "0.5", "exponential fit window starts at this fraction of the final time"},
    {"output", "seed", "1", "seed for randomized trial functions"},
};

std::pair<std::string, std::string> split_dotted(const std::string& dotted) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted.size())
        throw ConfigError("expected section.key, got '" + dotted + "'");
    return {dotted.substr(0, dot), dotted.substr(dot + 1)};
}

std::string trim(std::string s) {
    auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
    return s;
}

double parse_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || std::isnan(x))
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return x;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

Config Config::defaults() {
    Config c;
    for (const auto& e : kDefaults) c.values_[e.section][e.key] = e.value;
    return c;
}

std::string Config::defaults_ini() {
    std::ostringstream os;
    std::string section;
    for (const auto& e : kDefaults) {
        if (section != e.section) {
            if (!section.empty()) os << "\n";
            section = e.section;
            os << "[" << section << "]\n";
        }
        if (*e.doc) os << "; " << e.doc << "\n";
        os << e.key << " = " << e.value << "\n";
    }
    return os.str();
}

void Config::set(const std::string& dotted, const std::string& value) {
    const auto [s, k] = split_dotted(dotted);
    auto sec = values_.find(s);
    if (sec == values_.end() || !sec->second.contains(k)) throw ConfigError("unknown key " + dotted);
    sec->second[k] = trim(value);
}

void Config::merge_string(const std::string& text, const std::string& origin) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(origin + "(" + std::to_string(e.line()) + "): " + e.message());
    }
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(origin + ": key '" + section + "' outside a section");
        for (const auto& [key, node] : body) {
            try {
                set(section + "." + key, node.data());
            } catch (const ConfigError& e) {
                // ptree drops line numbers after parsing, so find the key in the text
                std::istringstream lines(text);
                std::string line, current;
                int no = 0, found = 0;
                while (std::getline(lines, line)) {
                    ++no;
                    const std::string t = trim(line);
                    if (t.size() > 1 && t.front() == '[') current = trim(t.substr(1, t.find(']') - 1));
                    else if (current == section && trim(t.substr(0, t.find('='))) == key) found = found ? found : no;
                }
                throw ConfigError(origin + "(" + std::to_string(found) + "): " + e.what());
            }
        }
    }
}

void Config::merge_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    merge_string(ss.str(), path);
}

void Config::merge_env() {
    for (const auto& e : kDefaults) {
        std::string name = std::string("TORUSFLOW_") + e.section + "_" + e.key;
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return char(std::toupper(c)); });
        if (const char* v = std::getenv(name.c_str())) values_[e.section][e.key] = trim(v);
    }
}

std::vector<std::string> Config::merge_flags(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    for (const auto& a : args) {
        const auto eq = a.find('=');
        if (a.rfind("--", 0) == 0 && eq != std::string::npos && a.substr(2, eq - 2).find('.') != std::string::npos)
            set(a.substr(2, eq - 2), a.substr(eq + 1));
        else
            rest.push_back(a);
    }
    return rest;
}

std::string Config::get(const std::string& dotted) const {
    const auto [s, k] = split_dotted(dotted);
    auto sec = values_.find(s);
    if (sec == values_.end() || !sec->second.contains(k)) throw ConfigError("unknown key " + dotted);
    return sec->second.at(k);
}

double Config::number(const std::string& dotted) const { return parse_double(dotted, get(dotted)); }

long Config::integer(const std::string& dotted) const {
    const double x = number(dotted);
    if (x != std::floor(x) || std::abs(x) > 1e15) throw ConfigError(dotted + ": expected an integer, got '" + get(dotted) + "'");
    return long(x);
}

bool Config::boolean(const std::string& dotted) const {
    const std::string v = get(dotted);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(dotted + ": expected true or false, got '" + v + "'");
}

std::vector<double> Config::numbers(const std::string& dotted) const {
    std::vector<double> out;
    std::stringstream ss(get(dotted));
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(dotted, item));
    }
    return out;
}

std::string Config::canonical() const {
    std::ostringstream os;
    for (const auto& [s, keys] : values_)
        for (const auto& [k, v] : keys) {
            // where outputs go and how many threads run them do not change their content
            if ((s == "output" && k == "dir") || (s == "sweep" && k == "jobs")) continue;
            os << s << "." << k << "=" << v << "\n";
        }
    return os.str();
}

std::string Config::hash() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
    return buf;
}

void Config::validate() const {
    auto positive = [&](const char* key) {
        if (!(number(key) > 0.0)) throw ConfigError(std::string(key) + " must be positive");
    };
    auto nonnegative = [&](const char* key) {
        if (!(number(key) >= 0.0)) throw ConfigError(std::string(key) + " must be nonnegative");
    };
    const std::string shape = get("geometry.shape");
    static const char* shapes[] = {"circle", "strip", "lamellae", "perturbed_circle", "perturbed_strip", "snapshot"};
    if (std::find(std::begin(shapes), std::end(shapes), shape) == std::end(shapes))
        throw ConfigError("geometry.shape: unknown shape '" + shape + "'");
    positive("geometry.r");
    if (number("geometry.r") >= 0.5) throw ConfigError("geometry.r must be below 0.5");
    positive("geometry.h");
    if (number("geometry.h") >= 1.0) throw ConfigError("geometry.h must be below 1");
    const long angle = integer("geometry.angle");
    if (angle != 0 && angle != 90 && angle != 45) throw ConfigError("geometry.angle must be 0, 90 or 45");
    if (integer("geometry.k") < 1) throw ConfigError("geometry.k must be at least 1");
    if (integer("geometry.mode") < 1) throw ConfigError("geometry.mode must be at least 1");
    nonnegative("geometry.amplitude");
    if (integer("geometry.markers") < 16) throw ConfigError("geometry.markers must be at least 16");
    if (shape == "snapshot") {
        if (get("geometry.file").empty()) throw ConfigError("geometry.file is required for shape = snapshot");
        if (!std::ifstream(get("geometry.file"))) throw ConfigError("geometry.file not found: " + get("geometry.file"));
    }
    parse_flow_kind(get("flow.kind"));
    parse_scheme(get("flow.scheme"));
    nonnegative("flow.gamma");
    nonnegative("flow.c_cfl");
    positive("flow.t_end");
    nonnegative("flow.max_steps");
    integer("flow.max_steps");
    positive("flow.area_tol");
    positive("flow.dt_min");
    boolean("flow.resample");
    boolean("flow.enforce_volume");
    if (integer("grid.n") < 16) throw ConfigError("grid.n must be at least 16");
    positive("monitor.eps0");
    positive("monitor.delta0");
    const std::string ref = get("monitor.reference");
    if (ref != "base" && ref != "none") throw ConfigError("monitor.reference must be base or none");
    for (double g : numbers("stability.gammas"))
        if (g < 0.0) throw ConfigError("stability.gammas must be nonnegative");
    if (integer("stability.n_modes") < 0) throw ConfigError("stability.n_modes must be nonnegative");
    positive("stability.rel_tol");
    const long kmax = integer("stability.threshold_k_max");
    if (kmax < 0 || kmax > 16) throw ConfigError("stability.threshold_k_max must be in 0..16");
    positive("stability.threshold_h");
    if (integer("stability.threshold_markers") < 16) throw ConfigError("stability.threshold_markers must be at least 16");
    if (integer("verify.steps") < 2) throw ConfigError("verify.steps must be at least 2");
    nonnegative("verify.dt");
    if (integer("verify.trials") < 0) throw ConfigError("verify.trials must be nonnegative");
    split_dotted(get("sweep.param"));
    numbers("sweep.values");
    if (integer("sweep.jobs") < 1) throw ConfigError("sweep.jobs must be at least 1");
    if (get("output.dir").empty()) throw ConfigError("output.dir must not be empty");
    if (integer("output.snapshot_every") < 0) throw ConfigError("output.snapshot_every must be nonnegative");
    boolean("output.plots");
    const double fit = number("output.fit_from");
    if (fit < 0.0 || fit >= 1.0) throw ConfigError("output.fit_from must be in [0, 1)");
    integer("output.seed");
}

Scenario build_scenario(const Config& c) {
    c.validate();
    Scenario s;
    const std::string shape = c.get("geometry.shape");
    const Vec2 center{c.number("geometry.center_x"), c.number("geometry.center_y")};
    const double r = c.number("geometry.r"), h = c.number("geometry.h"), y0 = c.number("geometry.offset");
    const double eps = c.number("geometry.amplitude");
    const int mode = int(c.integer("geometry.mode"));
    const auto n = std::size_t(c.integer("geometry.markers"));
    const long angle = c.integer("geometry.angle");
    const auto strip_angle = angle == 0 ? shapes::StripAngle::horizontal
                                        : (angle == 90 ? shapes::StripAngle::vertical : shapes::StripAngle::diagonal);
    if (shape == "circle") {
        s.initial = shapes::circle(center, r, n);
        s.reference = s.initial;
    } else if (shape == "strip") {
        s.initial = shapes::strip(y0, h, n, strip_angle);
        s.reference = s.initial;
    } else if (shape == "lamellae") {
        s.initial = shapes::lamellae(int(c.integer("geometry.k")), h, n);
        s.reference = s.initial;
    } else if (shape == "perturbed_circle") {
        s.initial = shapes::perturbed_circle(center, r, mode, eps, n);
        s.reference = shapes::circle(center, r, n);
    } else if (shape == "perturbed_strip") {
        if (angle != 0) throw ConfigError("perturbed_strip supports angle = 0 only");
        s.initial = shapes::graph_strip(y0, y0 + h, [](double) { return 0.0; },
                                        [=](double x) { return eps * std::cos(2.0 * std::numbers::pi * mode * x); }, n);
        s.reference = shapes::strip(y0, h, n);
    } else {
        s.initial = read_snapshot(c.get("geometry.file"));
    }
    s.kind = parse_flow_kind(c.get("flow.kind"));
    s.gamma = s.kind == FlowKind::sd ? 0.0 : c.number("flow.gamma");
    s.params.scheme = parse_scheme(c.get("flow.scheme"));
    s.params.c_cfl = c.number("flow.c_cfl");
    s.params.area_tol = c.number("flow.area_tol");
    s.params.dt_min = c.number("flow.dt_min");
    s.params.max_steps = std::size_t(c.integer("flow.max_steps"));
    s.params.resample = c.boolean("flow.resample");
    s.params.enforce_volume = c.boolean("flow.enforce_volume");
    s.monitor.eps0 = c.number("monitor.eps0");
    s.monitor.delta0 = c.number("monitor.delta0");
    if (c.get("monitor.reference") == "base" && s.reference) s.monitor.reference = s.reference;
    s.t_end = c.number("flow.t_end");
    return s;
}

}  // namespace torusflow::cli
