#include "config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ips {

using json = nlohmann::json;

const std::vector<std::string>& scan_method_names() {
    static const std::vector<std::string> m{"probe", "ssm", "cim", "i1", "ips", "ips_function", "weak"};
    return m;
}

namespace {

[[noreturn]] void bad(const std::string& m) { throw Error(E_CONFIG, m); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) bad(where + ": expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) bad(where + ": unknown key '" + it.key() + "'");
}

double num(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where + ": expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) bad(where + ": not finite");
    return v;
}

double positive(const json& j, const std::string& where) {
    double v = num(j, where);
    if (!(v > 0)) bad(where + ": must be positive");
    return v;
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) bad(where + ": expected an integer");
    return j.get<int>();
}

Vec3 vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) bad(where + ": expected [x, y, z]");
    return {num(j[0], where), num(j[1], where), num(j[2], where)};
}

std::vector<Vec3> vec3_list(const json& j, const std::string& where) {
    if (!j.is_array()) bad(where + ": expected a list of points");
    std::vector<Vec3> r;
    for (std::size_t i = 0; i < j.size(); ++i) r.push_back(vec3(j[i], where + "[" + std::to_string(i) + "]"));
    return r;
}

std::vector<std::string> strings(const json& j, const std::string& where) {
    if (!j.is_array()) bad(where + ": expected a list of strings");
    std::vector<std::string> r;
    for (const auto& e : j) {
        if (!e.is_string()) bad(where + ": expected a list of strings");
        r.push_back(e.get<std::string>());
    }
    return r;
}

Shape parse_shape(const json& j, const std::string& where) {
    allow_keys(j, where, {"kind", "center", "radius", "lo", "hi", "sign", "amp", "bump", "collar"});
    Shape s;
    std::string kind = j.value("kind", "ball");
    if (kind == "ball") {
        s.kind = Shape::Ball;
        if (!j.contains("center") || !j.contains("radius")) bad(where + ": ball needs center and radius");
        s.c = vec3(j["center"], where + ".center");
        s.r = positive(j["radius"], where + ".radius");
    } else if (kind == "box") {
        s.kind = Shape::Box;
        if (!j.contains("lo") || !j.contains("hi")) bad(where + ": box needs lo and hi");
        s.c = vec3(j["lo"], where + ".lo");
        s.hi = vec3(j["hi"], where + ".hi");
    } else {
        bad(where + ": kind must be ball or box");
    }
    if (j.contains("sign")) {
        s.sign = integer(j["sign"], where + ".sign");
        if (s.sign != 1 && s.sign != -1) bad(where + ".sign: must be +1 or -1");
    }
    if (j.contains("amp")) s.amp = positive(j["amp"], where + ".amp");
    if (j.contains("bump")) s.bump = num(j["bump"], where + ".bump");
    if (j.contains("collar")) s.collar = num(j["collar"], where + ".collar");
    return s;
}

std::vector<double> distance_list(const json& j, const std::string& where) {
    std::vector<double> d;
    if (j.is_array()) {
        for (const auto& e : j) d.push_back(positive(e, where));
    } else if (j.is_object()) {
        allow_keys(j, where, {"from", "to", "count"});
        double a = positive(j.at("from"), where + ".from"), b = positive(j.at("to"), where + ".to");
        int n = integer(j.at("count"), where + ".count");
        if (n < 2) bad(where + ".count: need at least two");
        for (int i = 0; i < n; ++i) d.push_back(a * std::pow(b / a, double(i) / (n - 1)));
    } else {
        bad(where + ": expected a list or {from, to, count}");
    }
    for (std::size_t i = 1; i < d.size(); ++i)
        if (!(d[i] < d[i - 1])) bad(where + ": distances must decrease");
    return d;
}

PointSet parse_point_set(const json& j, const std::string& where, const ObstacleSpec& ob, const Vec3& ext) {
    if (!j.is_object() || !j.contains("type")) bad(where + ": needs a type");
    std::string type = j["type"].get<std::string>();
    PointSet p;
    if (type == "list") {
        allow_keys(j, where, {"type", "name", "points"});
        p.points = vec3_list(j.at("points"), where + ".points");
    } else if (type == "line") {
        allow_keys(j, where, {"type", "name", "target", "direction", "distances"});
        Vec3 a = vec3(j.at("target"), where + ".target");
        Vec3 dir = vec3(j.at("direction"), where + ".direction");
        double n = std::sqrt(dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]);
        if (!(n > 0)) bad(where + ".direction: zero vector");
        for (double& c : dir) c /= n;
        p.distances = distance_list(j.at("distances"), where + ".distances");
        p.is_line = true;
        p.target = a;
        for (double d : p.distances) p.points.push_back({a[0] + d * dir[0], a[1] + d * dir[1], a[2] + d * dir[2]});
    } else if (type == "lattice") {
        allow_keys(j, where, {"type", "name", "lo", "hi", "count", "margin_obstacle", "margin_boundary"});
        Vec3 lo = vec3(j.at("lo"), where + ".lo"), hi = vec3(j.at("hi"), where + ".hi");
        const json& c = j.at("count");
        if (!c.is_array() || c.size() != 3) bad(where + ".count: expected three integers");
        int cnt[3];
        for (int a = 0; a < 3; ++a) {
            cnt[a] = integer(c[a], where + ".count");
            if (cnt[a] < 1) bad(where + ".count: must be positive");
        }
        double mo = j.contains("margin_obstacle") ? num(j["margin_obstacle"], where) : 0.0;
        double mb = j.contains("margin_boundary") ? num(j["margin_boundary"], where) : 0.0;
        for (int k = 0; k < cnt[2]; ++k)
            for (int jj = 0; jj < cnt[1]; ++jj)
                for (int i = 0; i < cnt[0]; ++i) {
                    int id[3] = {i, jj, k};
                    Vec3 x;
                    for (int a = 0; a < 3; ++a)
                        x[a] = cnt[a] == 1 ? 0.5 * (lo[a] + hi[a]) : lo[a] + (hi[a] - lo[a]) * id[a] / (cnt[a] - 1);
                    double db = std::min({x[0], x[1], x[2], ext[0] - x[0], ext[1] - x[1], ext[2] - x[2]});
                    if (db < mb) continue;
                    if (!ob.shapes.empty()) {
                        double d = distance_to_obstacle_boundary(ob, x);
                        if (d < mo) continue;  // also drops points inside D
                    }
                    p.points.push_back(x);
                }
    } else {
        bad(where + ": type must be list, line or lattice");
    }
    p.name = j.value("name", where);
    for (const auto& x : p.points)
        for (int a = 0; a < 3; ++a)
            if (!(x[a] > 0 && x[a] < ext[a])) bad(where + ": point outside the box");
    return p;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        bad(std::string("config is not valid JSON: ") + e.what());
    }
    allow_keys(j, "config",
               {"name", "grid", "obstacle", "solver", "quadrature", "methods", "points", "needles", "needle_params",
                "classify", "seed", "out", "cache_dir"});
    ExperimentConfig c;
    try {
        if (j.contains("name")) c.name = j["name"].get<std::string>();
        if (j.contains("grid")) {
            const json& g = j["grid"];
            allow_keys(g, "grid", {"n", "ext"});
            if (g.contains("n")) {
                if (g["n"].is_number_integer()) {
                    int n = g["n"].get<int>();
                    c.n = {n, n, n};
                } else if (g["n"].is_array() && g["n"].size() == 3) {
                    for (int a = 0; a < 3; ++a) c.n[a] = integer(g["n"][a], "grid.n");
                } else {
                    bad("grid.n: expected an integer or three integers");
                }
            }
            if (g.contains("ext")) c.ext = vec3(g["ext"], "grid.ext");
        }
        for (int a = 0; a < 3; ++a) {
            if (c.n[a] < 4) bad("grid.n: at least 4 nodes per axis");
            if (!(c.ext[a] > 0)) bad("grid.ext: must be positive");
        }
        if (j.contains("obstacle")) {
            const json& o = j["obstacle"];
            allow_keys(o, "obstacle", {"shapes"});
            if (o.contains("shapes")) {
                if (!o["shapes"].is_array()) bad("obstacle.shapes: expected a list");
                for (std::size_t i = 0; i < o["shapes"].size(); ++i)
                    c.obstacle.shapes.push_back(parse_shape(o["shapes"][i], "obstacle.shapes[" + std::to_string(i) + "]"));
            }
        }
        validate_obstacle(c.ext, c.obstacle);
        if (j.contains("solver")) {
            const json& s = j["solver"];
            allow_keys(s, "solver", {"rtol", "max_iter", "wellposed_floor"});
            if (s.contains("rtol")) c.solver_rtol = positive(s["rtol"], "solver.rtol");
            if (s.contains("max_iter")) c.solver_max_iter = integer(s["max_iter"], "solver.max_iter");
            if (s.contains("wellposed_floor")) c.wellposed_floor = positive(s["wellposed_floor"], "solver.wellposed_floor");
            if (c.solver_max_iter < 1) bad("solver.max_iter: must be positive");
        }
        if (j.contains("quadrature")) {
            const json& q = j["quadrature"];
            allow_keys(q, "quadrature", {"rtol", "exterior_volume"});
            if (q.contains("rtol")) c.quad.quad_rtol = positive(q["rtol"], "quadrature.rtol");
            if (q.contains("exterior_volume")) c.quad.exterior_volume = q["exterior_volume"].get<bool>();
        }
        if (j.contains("methods")) {
            c.methods = strings(j["methods"], "methods");
            for (const auto& m : c.methods) {
                bool ok = false;
                for (const auto& k : scan_method_names()) ok = ok || k == m;
                if (!ok) bad("methods: unknown method '" + m + "'");
            }
        }
        if (j.contains("points")) {
            if (!j["points"].is_array()) bad("points: expected a list");
            for (std::size_t i = 0; i < j["points"].size(); ++i)
                c.point_sets.push_back(
                    parse_point_set(j["points"][i], "points[" + std::to_string(i) + "]", c.obstacle, c.ext));
        }
        if (j.contains("needles")) {
            if (!j["needles"].is_array()) bad("needles: expected a list");
            for (std::size_t i = 0; i < j["needles"].size(); ++i) {
                const json& e = j["needles"][i];
                std::string w = "needles[" + std::to_string(i) + "]";
                allow_keys(e, w, {"entry", "waypoints", "tip"});
                NeedleDesc d;
                d.entry = vec3(e.at("entry"), w + ".entry");
                d.tip = vec3(e.at("tip"), w + ".tip");
                if (e.contains("waypoints")) d.waypoints = vec3_list(e["waypoints"], w + ".waypoints");
                make_needle(c.ext, d.entry, d.waypoints, d.tip);  // validates
                c.needles.push_back(d);
            }
        }
        if (j.contains("needle_params")) {
            const json& p = j["needle_params"];
            allow_keys(p, "needle_params", {"delta0", "ratio", "levels", "tau0", "min_delta_h", "far_dist", "far_stride",
                                            "patch_factor"});
            auto& q = c.needle_params;
            if (p.contains("delta0")) q.delta0 = positive(p["delta0"], "needle_params.delta0");
            if (p.contains("ratio")) q.ratio = positive(p["ratio"], "needle_params.ratio");
            if (p.contains("levels")) q.levels = integer(p["levels"], "needle_params.levels");
            if (p.contains("tau0")) q.tau0 = positive(p["tau0"], "needle_params.tau0");
            if (p.contains("min_delta_h")) q.min_delta_h = positive(p["min_delta_h"], "needle_params.min_delta_h");
            if (p.contains("far_dist")) q.far_dist = positive(p["far_dist"], "needle_params.far_dist");
            if (p.contains("far_stride")) q.far_stride = integer(p["far_stride"], "needle_params.far_stride");
            if (p.contains("patch_factor")) q.patch_factor = positive(p["patch_factor"], "needle_params.patch_factor");
            if (q.ratio >= 1) bad("needle_params.ratio: must be below 1");
            if (q.levels < 1 || q.levels > 12) bad("needle_params.levels: 1 to 12");
            if (q.far_stride < 1) bad("needle_params.far_stride: must be positive");
        }
        if (j.contains("classify")) {
            const json& k = j["classify"];
            allow_keys(k, "classify", {"points", "methods", "components", "needles_per_point", "angle_deg"});
            auto& q = c.classify;
            if (k.contains("points")) q.points = vec3_list(k["points"], "classify.points");
            if (k.contains("methods")) q.methods = strings(k["methods"], "classify.methods");
            for (const auto& m : q.methods)
                if (m != "probe" && m != "ssm" && m != "cim") bad("classify.methods: probe, ssm or cim");
            if (k.contains("components")) {
                q.components.clear();
                for (const auto& e : k["components"]) {
                    int v = integer(e, "classify.components");
                    if (v < 1 || v > 3) bad("classify.components: 1, 2 or 3");
                    q.components.push_back(v - 1);
                }
            }
            if (k.contains("needles_per_point")) q.needles_per_point = integer(k["needles_per_point"], "classify");
            if (k.contains("angle_deg")) q.angle_deg = positive(k["angle_deg"], "classify.angle_deg");
            if (q.needles_per_point < 1) bad("classify.needles_per_point: must be positive");
            for (const auto& x : q.points)
                for (int a = 0; a < 3; ++a)
                    if (!(x[a] > 0 && x[a] < c.ext[a])) bad("classify.points: point outside the box");
        }
        if (j.contains("seed")) {
            if (!j["seed"].is_number_unsigned()) bad("seed: expected a non-negative integer");
            c.seed = j["seed"].get<std::uint64_t>();
        }
        if (j.contains("out")) c.out_dir = j["out"].get<std::string>();
        if (j.contains("cache_dir")) c.cache_dir = j["cache_dir"].get<std::string>();
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        bad(std::string("config: ") + e.what());
    }
    c.source_text = j.dump();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(E_CONFIG, "cannot read config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void override_grid(ExperimentConfig& c, const std::string& spec) {
    std::array<int, 3> n{};
    int k = std::sscanf(spec.c_str(), "%dx%dx%d", &n[0], &n[1], &n[2]);
    if (k == 1) n[1] = n[2] = n[0];
    else if (k != 3) throw Error(E_CONFIG, "grid override must look like 32 or 32x32x32");
    for (int a = 0; a < 3; ++a)
        if (n[a] < 4) throw Error(E_CONFIG, "grid override: at least 4 nodes per axis");
    json j = json::parse(c.source_text);
    j["grid"]["n"] = {n[0], n[1], n[2]};
    c = parse_config(j.dump());
}

std::uint64_t config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : c.source_text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace ips
