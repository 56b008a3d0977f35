#include "scan.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "kernel.hpp"

namespace ips {

using json = nlohmann::json;

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn) {
    int t = std::max(1, std::min<int>(threads, int(n)));
    if (t <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int k = 0; k < t; ++k)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) fn(i);
        });
    for (auto& th : pool) th.join();
}

RateFit fit_rate(const std::vector<double>& d, const std::vector<double>& v) {
    if (d.size() != v.size()) throw Error(E_ARG, "fit_rate: size mismatch");
    if (d.size() < 4) throw Error(E_ARG, "fit_rate: need at least 4 points");
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0)) throw Error(E_ARG, "fit_rate: distances must be positive");
        if (i && !(d[i] < d[i - 1])) throw Error(E_ARG, "fit_rate: distances must decrease");
    }
    RateFit r;
    r.sign = v.back() > 0 ? 1 : (v.back() < 0 ? -1 : 0);
    if (r.sign == 0) throw Error(E_NUMERIC, "fit_rate: last value is zero");
    std::vector<double> X, Y;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (r.sign * v[i] > 0 && std::isfinite(v[i])) {
            X.push_back(std::log(d[i]));
            Y.push_back(std::log(std::abs(v[i])));
        } else {
            r.sign_split = true;
        }
    }
    r.points = int(X.size());
    if (r.points < 2) throw Error(E_NUMERIC, "fit_rate: fewer than two values of one sign");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < X.size(); ++i) mx += X[i], my += Y[i];
    mx /= X.size();
    my /= Y.size();
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        sxx += (X[i] - mx) * (X[i] - mx);
        sxy += (X[i] - mx) * (Y[i] - my);
        syy += (Y[i] - my) * (Y[i] - my);
    }
    r.exponent = sxy / sxx;
    r.intercept = my - r.exponent * mx;
    double sse = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double e = Y[i] - r.intercept - r.exponent * X[i];
        sse += e * e;
    }
    r.r2 = syy > 0 ? 1 - sse / syy : 1.0;
    return r;
}

bool monotone_tail(const std::vector<double>& v, int sign, int k) {
    if (int(v.size()) < k || k < 2) return false;
    for (std::size_t i = v.size() - k + 1; i < v.size(); ++i)
        if (!(sign * v[i] > sign * v[i - 1])) return false;
    return sign * v[v.size() - k] > 0;
}

static GridSpec grid_of(const ExperimentConfig& c) { return build_grid(c.ext, c.n); }

RunInfo prepare_run(const ExperimentConfig& c, const GridSpec& g, const SchrodingerOperator& op) {
    RunInfo r;
    r.name = c.name;
    r.hash = config_hash(c);
    r.config_text = c.source_text;
    r.n = c.n;
    r.h = g.h;
    r.wp = check_wellposed(op, c.wellposed_floor);
    if (r.wp.near_singular || r.wp.indefinite || !r.wp.converged) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "operator is not well posed: smallest eigenvalue estimate %.6e", r.wp.lambda_min);
        throw Error(E_WELLPOSED, buf);
    }
    return r;
}

Indicator evaluate_method(const SchrodingerOperator& op, ProbeFields& px, const std::string& m,
                          const IndicatorOptions& quad) {
    if (m == "probe") return probe_indicator_direct(op, px);
    if (m == "ssm") return ssm_indicator(op, px, px);
    if (m == "cim") return cim_indicator(op, px, quad);
    if (m == "i1") return i1_indicator(op, px, px, quad);
    if (m == "ips") return ips_decomposition(op, px, quad);
    if (m == "ips_function") return ips_function(op, px, quad);
    if (m == "weak") return weak_kernel_indicator(op, px.x());
    throw Error(E_ARG, "unknown method '" + m + "'");
}

static void record(PointResult& p, const std::string& m, const Indicator& ind) {
    p.values[m] = ind.value;
    for (const auto& ch : ind.checks) p.check_err[m + "." + ch.name] = ch.rel_err();
    for (const auto& f : ind.flags)
        if (std::find(p.flags.begin(), p.flags.end(), f) == p.flags.end()) p.flags.push_back(f);
}

ScanReport run_scan(const ExperimentConfig& c, int threads) {
    GridSpec g = grid_of(c);
    auto P = sample_potential(g, c.obstacle);
    SchrodingerOperator op(g, P.V, c.solver_rtol, c.solver_max_iter);
    ScanReport rep;
    rep.info = prepare_run(c, g, op);
    rep.methods = c.methods;

    struct Job {
        int set, idx;
    };
    std::vector<Job> jobs;
    for (std::size_t s = 0; s < c.point_sets.size(); ++s)
        for (std::size_t i = 0; i < c.point_sets[s].points.size(); ++i) jobs.push_back({int(s), int(i)});
    rep.points.resize(jobs.size());

    parallel_for(jobs.size(), threads, [&](std::size_t k) {
        const auto& ps = c.point_sets[jobs[k].set];
        PointResult& p = rep.points[k];
        p.set = ps.name;
        p.index = jobs[k].idx;
        p.requested = ps.points[p.index];
        try {
            p.x = snap_probe(g, p.requested);
            // snapping moves the point, so the fit uses the distance actually achieved
            if (ps.is_line) p.distance = norm(sub(p.x, ps.target));
            ProbeFields px(op, p.x);
            for (const auto& m : c.methods) record(p, m, evaluate_method(op, px, m, c.quad));
            for (const auto& f : proximity_flags(g, c.obstacle.shapes.empty() ? nullptr : &c.obstacle, p.x))
                if (std::find(p.flags.begin(), p.flags.end(), f) == p.flags.end()) p.flags.push_back(f);
            p.log = px.log();
        } catch (const std::exception& e) {
            p.ok = false;
            p.error = e.what();
        }
    });

    // rate fits along lines, skipping points that snapped onto an earlier distance
    for (const auto& ps : c.point_sets) {
        if (!ps.is_line) continue;
        for (const auto& m : c.methods) {
            LineFit lf;
            lf.set = ps.name;
            lf.method = m;
            for (const auto& p : rep.points) {
                if (p.set != ps.name || !p.ok || !p.values.count(m)) continue;
                if (!lf.d.empty() && !(p.distance < lf.d.back())) continue;
                lf.d.push_back(p.distance);
                lf.v.push_back(p.values.at(m));
            }
            try {
                lf.fit = fit_rate(lf.d, lf.v);
                lf.monotone = monotone_tail(lf.v, lf.fit.sign, std::min<int>(5, int(lf.v.size())));
            } catch (const Error&) {
                lf.fit = RateFit{};
            }
            rep.fits.push_back(std::move(lf));
        }
    }
    return rep;
}

ClassifyReport run_classify(const ExperimentConfig& c, int threads) {
    GridSpec g = grid_of(c);
    auto P = sample_potential(g, c.obstacle);
    SchrodingerOperator op(g, P.V, c.solver_rtol, c.solver_max_iter);
    ClassifyReport rep;
    rep.info = prepare_run(c, g, op);
    const auto& k = c.classify;
    rep.rows.resize(k.points.size());
    parallel_for(k.points.size(), threads, [&](std::size_t i) {
        ClassifyRow& row = rep.rows[i];
        row.requested = k.points[i];
        try {
            row.x = snap_probe(g, row.requested);
            row.dist_D = c.obstacle.shapes.empty() ? INFINITY : distance_to_obstacle_boundary(c.obstacle, row.x);
            auto needles = spread_needles(g, row.x, k.needles_per_point, k.angle_deg);
            // sequences do not depend on V; one factorization per needle serves every component
            std::vector<std::vector<NeedleSequence>> seqs;
            for (const auto& s : needles) seqs.push_back(generate_needle_sequences(op, s, k.components, c.needle_params));
            for (std::size_t jc = 0; jc < k.components.size(); ++jc) {
                std::vector<SequenceSet> sets;
                for (auto& s : seqs) sets.push_back(indicator_sequences(op, s[jc], P.inD));
                std::vector<const SequenceSet*> ptr;
                for (const auto& s : sets) ptr.push_back(&s);
                for (const auto& m : k.methods) {
                    row.verdicts.push_back(decide(row.x, needles, ptr, parse_method(m), k.components[jc]));
                    std::vector<bool> h;
                    for (const auto& s : needles) h.push_back(needle_hits(s, c.obstacle));
                    row.hits.push_back(h);
                }
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
        }
    });
    return rep;
}

NeedleReport run_needles(const ExperimentConfig& c, int threads) {
    GridSpec g = grid_of(c);
    auto P = sample_potential(g, c.obstacle);
    SchrodingerOperator op(g, P.V, c.solver_rtol, c.solver_max_iter);
    NeedleReport rep;
    rep.info = prepare_run(c, g, op);
    rep.inD = P.inD;
    rep.grid = g;
    rep.runs.resize(c.needles.size());
    parallel_for(c.needles.size(), threads, [&](std::size_t i) {
        auto& r = rep.runs[i];
        try {
            const auto& d = c.needles[i];
            r.needle = make_needle(g.ext, d.entry, d.waypoints, d.tip);
            r.hits = needle_hits(r.needle, c.obstacle);
            r.seqs = generate_needle_sequences(op, r.needle, {0, 1, 2}, c.needle_params);
            if (!c.obstacle.shapes.empty()) {
                for (const auto& s : r.seqs) r.sets.push_back(indicator_sequences(op, s, P.inD));
                if (!r.hits)
                    for (auto m : {LimitMode::Probe, LimitMode::Ssm, LimitMode::Cim})
                        r.limits.push_back(dtn_limit_estimator(op, r.seqs, m));
            }
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
    });
    return rep;
}

ForwardReport run_forward(const ExperimentConfig& c, int threads) {
    (void)threads;
    GridSpec g = grid_of(c);
    auto P = sample_potential(g, c.obstacle);
    SchrodingerOperator op(g, P.V, c.solver_rtol, c.solver_max_iter);
    ForwardReport rep;
    rep.info = prepare_run(c, g, op);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int t = 0; t < 4; ++t) {
        BField f(g.n_boundary());
        for (double& v : f) v = U(rng);
        auto forms = difference_forms(op, f);
        double sc = std::max(std::abs(forms.pairing), 1e-300);
        rep.max_alessandrini_err = std::max(rep.max_alessandrini_err, std::abs(forms.alessandrini - forms.pairing) / sc);
        rep.max_energy_err = std::max(rep.max_energy_err, std::abs(forms.energy - forms.pairing) / sc);
        SolveStats st;
        op.solve(f, nullptr, &st);
        rep.solves++;
        rep.max_rel_res = std::max(rep.max_rel_res, st.rel_res);
    }
    if (g.n_interior() <= 1331) {
        auto m = assemble_dense_dtn(op, c.cache_dir);
        rep.dense = true;
        double mx = 0;
        for (std::size_t i = 0; i < m.nb; ++i)
            for (std::size_t j = 0; j < m.nb; ++j) {
                double a = m.pairing[i * m.nb + j], b = m.pairing[j * m.nb + i];
                rep.symmetry_err = std::max(rep.symmetry_err, std::abs(a - b));
                mx = std::max(mx, std::abs(a));
            }
        if (mx > 0) rep.symmetry_err /= mx;
    }
    if (!c.obstacle.shapes.empty()) rep.l1 = measure_l1_control(op, P.inD, 8, c.seed);
    return rep;
}

RatesReport run_rates(const ExperimentConfig& c, int threads) {
    RatesReport rep;
    // cutoff cone energy against eps for several axes, apertures and directions
    struct Combo {
        Vec3 a;
        double theta;
        Vec3 b;
        const char* name;
    };
    std::vector<Combo> combos{{{0, 0, 1}, 0.3, {0, 0, 1}, "cone_axis_parallel"},
                              {{0, 0, 1}, 0.1, {1, 0, 0}, "cone_narrow_perpendicular"},
                              {{1, 1, 0}, 0.5, {0, 1, 0}, "cone_oblique"},
                              {{1, 2, 3}, 1.2, {3, 2, 1}, "cone_wide_mixed"},
                              {{0, 1, 0}, 0.05, {0, 0, 1}, "cone_thin_perpendicular"}};
    std::vector<double> eps{1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
    std::vector<RateFit> cone(combos.size());
    parallel_for(combos.size(), threads, [&](std::size_t i) {
        std::vector<double> v;
        for (double e : eps) v.push_back(cone_energy_integral(combos[i].a, combos[i].theta, combos[i].b, e, 1.0));
        cone[i] = fit_rate(eps, v);
    });
    for (std::size_t i = 0; i < combos.size(); ++i) rep.fits.push_back({combos[i].name, cone[i]});
    double s = cone_energy_integral({0, 0, 1}, kPi, {1, 0, 0}, 0.01, 1.0);
    double sc = sphere_energy_closed_form(0.01, 1.0);
    rep.sphere_rel_err = std::abs(s - sc) / std::abs(sc);

    // exterior energy and the boundary/exterior ratio toward a face center
    Vec3 ext = c.ext;
    std::vector<double> d{0.1, 0.063, 0.04, 0.025, 0.016, 0.01}, e(d.size()), ratio(d.size());
    parallel_for(d.size(), threads, [&](std::size_t i) {
        Vec3 x{0.5 * ext[0], 0.5 * ext[1], ext[2] - d[i]};
        e[i] = exterior_hess_energy(ext, x, x).value;
        ratio[i] = boundary_grad_norm(ext, x).value / e[i];
    });
    rep.fits.push_back({"exterior_energy", fit_rate(d, e)});
    rep.fits.push_back({"boundary_exterior_ratio", fit_rate(d, ratio)});

    // I^1 toward the same face center on the configured grid
    GridSpec g = grid_of(c);
    auto P = sample_potential(g, c.obstacle);
    SchrodingerOperator op(g, P.V, c.solver_rtol, c.solver_max_iter);
    prepare_run(c, g, op);
    std::vector<double> di;
    double hz = g.h[2];
    for (int k = 8; k >= 2; --k) di.push_back((k + 0.5) * hz);
    rep.i1_v.assign(di.size(), 0.0);
    parallel_for(di.size(), threads, [&](std::size_t i) {
        Vec3 x = snap_probe(g, {0.5 * ext[0], 0.5 * ext[1], ext[2] - di[i]});
        ProbeFields px(op, x);
        rep.i1_v[i] = i1_indicator(op, px, px, c.quad).value;
    });
    rep.i1_d = di;
    rep.i1_monotone = monotone_tail(rep.i1_v, -1, 5);
    return rep;
}

// ---- writers ----

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

static std::string hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

static void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(E_IO, "cannot create output directory '" + dir + "': " + ec.message());
}

static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(E_IO, "cannot write '" + path + "'");
    f << text;
    if (!f) throw Error(E_IO, "write failed for '" + path + "'");
}

static json info_json(const RunInfo& r) {
    json j;
    j["name"] = r.name;
    j["config_hash"] = hex(r.hash);
    j["config"] = json::parse(r.config_text);
    j["grid"] = {{"n", {r.n[0], r.n[1], r.n[2]}}, {"h", {r.h[0], r.h[1], r.h[2]}}};
    j["wellposedness"] = {{"lambda_min", r.wp.lambda_min}, {"iters", r.wp.iters}, {"converged", r.wp.converged}};
    j["environment"] = {{"compiler", __VERSION__}, {"cxx", long(__cplusplus)}};
    return j;
}

static std::string vec_csv(const Vec3& v) { return fmt_num(v[0]) + ',' + fmt_num(v[1]) + ',' + fmt_num(v[2]); }

static std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string r = "\"";
    for (char ch : s) r += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return r + '"';
}

void emit_report(const ScanReport& r, const std::string& dir) {
    ensure_dir(dir);
    std::vector<std::string> checks;
    for (const auto& p : r.points)
        for (const auto& [k, v] : p.check_err)
            if (std::find(checks.begin(), checks.end(), k) == checks.end()) checks.push_back(k);
    std::sort(checks.begin(), checks.end());

    std::ostringstream os;
    os << "set,index,x_req,y_req,z_req,x,y,z,distance,ok";
    for (const auto& m : r.methods) os << ',' << m;
    for (const auto& k : checks) os << ",err:" << k;
    os << ",solves,iters,max_rel_res,flags,error\n";
    int solves = 0, iters = 0, failed = 0;
    double maxres = 0;
    for (const auto& p : r.points) {
        os << csv_escape(p.set) << ',' << p.index << ',' << vec_csv(p.requested) << ',' << vec_csv(p.x) << ','
           << fmt_num(p.distance) << ',' << int(p.ok);
        for (const auto& m : r.methods) os << ',' << (p.values.count(m) ? fmt_num(p.values.at(m)) : "");
        for (const auto& k : checks) os << ',' << (p.check_err.count(k) ? fmt_num(p.check_err.at(k)) : "");
        std::string fl;
        for (const auto& f : p.flags) fl += (fl.empty() ? "" : ";") + f;
        os << ',' << p.log.solves << ',' << p.log.iters << ',' << fmt_num(p.log.max_rel_res) << ',' << csv_escape(fl)
           << ',' << csv_escape(p.error) << '\n';
        solves += p.log.solves;
        iters += p.log.iters;
        maxres = std::max(maxres, p.log.max_rel_res);
        failed += !p.ok;
    }
    write_file(dir + "/points.csv", os.str());

    std::ostringstream fs;
    fs << "set,method,points,exponent,intercept,r2,sign,sign_split,monotone_tail\n";
    for (const auto& f : r.fits)
        fs << csv_escape(f.set) << ',' << f.method << ',' << f.fit.points << ',' << fmt_num(f.fit.exponent) << ','
           << fmt_num(f.fit.intercept) << ',' << fmt_num(f.fit.r2) << ',' << f.fit.sign << ',' << int(f.fit.sign_split)
           << ',' << int(f.monotone) << '\n';
    write_file(dir + "/fits.csv", fs.str());

    json j = info_json(r.info);
    j["points"] = r.points.size();
    j["failed_points"] = failed;
    j["solver"] = {{"solves", solves}, {"iterations", iters}, {"max_rel_res", maxres}};
    json fits = json::array();
    for (const auto& f : r.fits)
        fits.push_back({{"set", f.set}, {"method", f.method}, {"exponent", f.fit.exponent}, {"r2", f.fit.r2},
                        {"points", f.fit.points}, {"sign", f.fit.sign}, {"sign_split", f.fit.sign_split},
                        {"monotone_tail", f.monotone}});
    j["fits"] = fits;
    write_file(dir + "/report.json", j.dump(2) + "\n");

    std::ostringstream su;
    su << "scan " << r.info.name << " config " << hex(r.info.hash) << "\n";
    su << "points " << r.points.size() << ", failed " << failed << ", solves " << solves << ", max rel residual "
       << fmt_num(maxres) << "\n";
    for (const auto& k : checks) {
        double mx = 0;
        int used = 0;
        for (const auto& p : r.points)
            if (p.check_err.count(k) && p.flags.empty()) mx = std::max(mx, p.check_err.at(k)), ++used;
        if (!used) {
            su << "SKIP check " << k << " (every point carries a proximity flag)\n";
            continue;
        }
        su << (mx <= 3e-2 ? "PASS" : "FAIL") << " check " << k << " max rel err " << fmt_num(mx) << " over " << used
           << " points without proximity flags (budget 3e-2)\n";
    }
    for (const auto& f : r.fits) {
        // the weak kernel is the control that should not blow up; i1 is driven by the box, not by D
        if (f.method == "weak" || f.method == "i1") {
            su << "INFO rate " << f.set << '/' << f.method << " exponent " << fmt_num(f.fit.exponent) << " r2 "
               << fmt_num(f.fit.r2) << "\n";
            continue;
        }
        bool pass = f.fit.points >= 4 && f.monotone && f.fit.exponent <= -0.85;
        su << (pass ? "PASS" : "FAIL") << " blowup " << f.set << '/' << f.method << " exponent "
           << fmt_num(f.fit.exponent) << " r2 " << fmt_num(f.fit.r2) << " sign " << f.fit.sign
           << (f.monotone ? " monotone" : " not monotone") << " (exponent <= -0.85, monotone tail)\n";
    }
    write_file(dir + "/summary.txt", su.str());
}

void emit_report(const ClassifyReport& r, const std::string& dir) {
    ensure_dir(dir);
    std::ostringstream os;
    os << "x,y,z,dist_D,method,component,verdict,needles,diverging,converging,error\n";
    json ev = json::array();
    int n = 0, inside = 0, outside = 0, inconclusive = 0;
    for (const auto& row : r.rows) {
        if (!row.ok) {
            os << vec_csv(row.x) << ',' << fmt_num(row.dist_D) << ",,,error,0,0,0," << csv_escape(row.error) << '\n';
            continue;
        }
        json pj;
        pj["x"] = {row.x[0], row.x[1], row.x[2]};
        pj["dist_D"] = row.dist_D;
        json vs = json::array();
        for (std::size_t i = 0; i < row.verdicts.size(); ++i) {
            const auto& v = row.verdicts[i];
            int dv = 0, cv = 0;
            json nj = json::array();
            for (std::size_t k = 0; k < v.evidence.size(); ++k) {
                const auto& e = v.evidence[k];
                dv += e.judgement.trend == Trend::Diverges;
                cv += e.judgement.trend == Trend::Converges;
                json pts = json::array();
                for (const auto& q : e.needle.v) pts.push_back({q[0], q[1], q[2]});
                nj.push_back({{"vertices", pts},
                              {"hits_D", bool(row.hits[i][k])},
                              {"values", e.values},
                              {"trend", trend_name(e.judgement.trend)},
                              {"levels_used", e.judgement.used},
                              {"growth", e.judgement.growth},
                              {"sign", e.judgement.sign},
                              {"spread", e.judgement.spread}});
            }
            os << vec_csv(row.x) << ',' << fmt_num(row.dist_D) << ',' << method_name(v.method) << ',' << v.j + 1 << ','
               << verdict_name(v.verdict) << ',' << v.evidence.size() << ',' << dv << ',' << cv << ",\n";
            vs.push_back({{"method", method_name(v.method)},
                          {"component", v.j + 1},
                          {"verdict", verdict_name(v.verdict)},
                          {"needles", nj}});
            ++n;
            inside += v.verdict == Verdict::InsideDbar;
            outside += v.verdict == Verdict::Outside;
            inconclusive += v.verdict == Verdict::Inconclusive;
        }
        pj["verdicts"] = vs;
        ev.push_back(pj);
    }
    write_file(dir + "/verdicts.csv", os.str());
    json j = info_json(r.info);
    j["evidence"] = ev;
    write_file(dir + "/evidence.json", j.dump(2) + "\n");
    std::ostringstream su;
    su << "classify " << r.info.name << " config " << hex(r.info.hash) << "\n";
    su << "verdicts " << n << ": inside_Dbar " << inside << ", outside " << outside << ", inconclusive "
       << inconclusive << "\n";
    write_file(dir + "/summary.txt", su.str());
}

void emit_report(const NeedleReport& r, const std::string& dir) {
    ensure_dir(dir);
    std::ostringstream su;
    su << "needles " << r.info.name << " config " << hex(r.info.hash) << "\n";
    std::ostringstream ls;
    ls << "needle,mode,level,delta,usable,value,target,rel_err\n";
    std::ostringstream ss;
    ss << "needle,component,method,level,delta,usable,value,identity,l2_D,l1_D\n";
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const auto& run = r.runs[i];
        if (!run.ok) {
            su << "needle " << i << " failed: " << run.error << "\n";
            continue;
        }
        // a ball around the middle of the needle, for the blow-up of the norms there
        Vec3 mid = run.needle.at(0.5);
        double rad = 0.1;
        Mask ball(r.grid.lattice, 0);
        for (auto l : r.grid.interior)
            if (norm(sub(r.grid.pos(l), mid)) <= rad) ball[l] = 1;
        std::vector<std::pair<std::string, Mask>> regions{{"mid_ball", ball}};
        bool anyD = false;
        for (auto b : r.inD) anyD = anyD || b;
        if (anyD) regions.push_back({"D", r.inD});
        for (const auto& s : run.seqs)
            write_file(dir + "/needle" + std::to_string(i) + "_j" + std::to_string(s.j + 1) + ".csv",
                       needle_csv(r.grid, s, regions));
        for (const auto& set : run.sets)
            for (auto m : {SeqMethod::Probe, SeqMethod::Ssm, SeqMethod::Cim}) {
                const auto& q = set.get(m);
                for (const auto& L : q.levels)
                    ss << i << ',' << q.j + 1 << ',' << method_name(m) << ',' << L.n << ',' << fmt_num(L.delta) << ','
                       << int(L.usable) << ',' << fmt_num(L.value) << ',' << fmt_num(L.identity) << ','
                       << fmt_num(L.l2) << ',' << fmt_num(L.l1) << '\n';
            }
        for (const auto& lim : run.limits)
            for (std::size_t k = 0; k < lim.value.size(); ++k)
                ls << i << ',' << limit_mode_name(lim.mode) << ',' << k + 1 << ',' << fmt_num(lim.delta[k]) << ','
                   << int(lim.usable[k]) << ',' << fmt_num(lim.value[k]) << ',' << fmt_num(lim.target) << ','
                   << fmt_num(lim.rel_err[k]) << '\n';
        su << "needle " << i << (run.hits ? " meets D" : " avoids D") << ", length " << fmt_num(run.needle.length())
           << "\n";
        for (const auto& lim : run.limits)
            su << "  " << limit_mode_name(lim.mode) << " rel err " << fmt_num(lim.final_rel_err()) << " at usable level "
               << lim.usable_levels() << " of " << lim.rel_err.size()
               << (lim.error_decreasing() ? ", decreasing" : ", not decreasing") << "\n";
        for (const auto& set : run.sets)
            for (auto m : {SeqMethod::Probe, SeqMethod::Ssm, SeqMethod::Cim}) {
                auto jd = judge_series(set.get(m).values(), set.get(m).usable());
                su << "  j" << set.probe.j + 1 << ' ' << method_name(m) << ' ' << trend_name(jd.trend) << " growth "
                   << fmt_num(jd.growth) << " spread " << fmt_num(jd.spread) << "\n";
            }
    }
    write_file(dir + "/sequences.csv", ss.str());
    write_file(dir + "/limits.csv", ls.str());
    json j = info_json(r.info);
    write_file(dir + "/report.json", j.dump(2) + "\n");
    write_file(dir + "/summary.txt", su.str());
}

void emit_report(const ForwardReport& r, const std::string& dir) {
    ensure_dir(dir);
    json j = info_json(r.info);
    j["solver"] = {{"solves", r.solves}, {"max_rel_res", r.max_rel_res}};
    j["difference_forms"] = {{"alessandrini_rel_err", r.max_alessandrini_err}, {"energy_rel_err", r.max_energy_err}};
    if (r.dense) j["dense_dtn"] = {{"symmetry_rel_err", r.symmetry_err}};
    if (!r.l1.ratios.empty()) j["l1_control"] = {{"max_ratio", r.l1.max_ratio}, {"mean_ratio", r.l1.mean_ratio}};
    write_file(dir + "/forward.json", j.dump(2) + "\n");
    std::ostringstream su;
    su << "forward " << r.info.name << " config " << hex(r.info.hash) << "\n";
    su << "lambda_min " << fmt_num(r.info.wp.lambda_min) << "\n";
    su << (r.max_alessandrini_err <= 1e-8 ? "PASS" : "FAIL") << " alessandrini form rel err "
       << fmt_num(r.max_alessandrini_err) << "\n";
    su << (r.max_energy_err <= 1e-8 ? "PASS" : "FAIL") << " energy form rel err " << fmt_num(r.max_energy_err) << "\n";
    if (r.dense)
        su << (r.symmetry_err <= 1e-10 ? "PASS" : "FAIL") << " dense DtN symmetry " << fmt_num(r.symmetry_err) << "\n";
    if (!r.l1.ratios.empty()) su << "l1 control max ratio " << fmt_num(r.l1.max_ratio) << "\n";
    write_file(dir + "/summary.txt", su.str());
}

void emit_report(const RatesReport& r, const std::string& dir) {
    ensure_dir(dir);
    std::ostringstream os;
    os << "name,points,exponent,intercept,r2\n";
    for (const auto& [name, f] : r.fits)
        os << name << ',' << f.points << ',' << fmt_num(f.exponent) << ',' << fmt_num(f.intercept) << ','
           << fmt_num(f.r2) << '\n';
    write_file(dir + "/rates.csv", os.str());
    std::ostringstream is;
    is << "distance,i1\n";
    for (std::size_t i = 0; i < r.i1_d.size(); ++i) is << fmt_num(r.i1_d[i]) << ',' << fmt_num(r.i1_v[i]) << '\n';
    write_file(dir + "/i1_face.csv", is.str());
    std::ostringstream su;
    for (const auto& [name, f] : r.fits) {
        bool pass = true;
        std::string want;
        if (name.rfind("cone", 0) == 0) pass = std::abs(f.exponent + 1) <= 0.05, want = "-1 +- 0.05";
        else if (name == "exterior_energy") pass = std::abs(f.exponent + 3) <= 0.1, want = "-3 +- 0.1";
        else if (name == "boundary_exterior_ratio") pass = f.exponent >= 0.4, want = ">= 0.4";
        su << (pass ? "PASS" : "FAIL") << ' ' << name << " exponent " << fmt_num(f.exponent) << " (" << want << ")\n";
    }
    su << (r.sphere_rel_err <= 0.01 ? "PASS" : "FAIL") << " full sphere closed form rel err "
       << fmt_num(r.sphere_rel_err) << "\n";
    su << (r.i1_monotone ? "PASS" : "FAIL") << " I1 decreasing toward the face over the last 5 points\n";
    write_file(dir + "/summary.txt", su.str());
}

}  // namespace ips
