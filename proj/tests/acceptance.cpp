// acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dtn_difference.hpp"
#include "scan.hpp"

using namespace ips;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& what) {
    std::printf("%s criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    failures += !pass;
}

template <class... A>
std::string fmt(const char* f, A... a) {
    char buf[1024];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

ObstacleSpec ball(Vec3 c, double r, int sign, double amp) {
    Shape s;
    s.c = c;
    s.r = r;
    s.sign = sign;
    s.amp = amp;
    return ObstacleSpec{{s}};
}

struct Problem {
    GridSpec g;
    PotentialSpec P;
    std::unique_ptr<SchrodingerOperator> op;
    Problem(int n, const ObstacleSpec& ob) : g(build_grid(n)), P(sample_potential(g, ob)) {
        op = std::make_unique<SchrodingerOperator>(g, P.V);
    }
};

const ObstacleSpec kBallPlus = ball({0.5, 0.5, 0.5}, 0.2, 1, 5.0);
const ObstacleSpec kBallMinus = ball({0.5, 0.5, 0.5}, 0.2, -1, 3.0);
const std::vector<Vec3> kProbes{{0.75, 0.5, 0.5}, {0.3, 0.3, 0.7}, {0.5, 0.8, 0.4}, {0.25, 0.6, 0.45}, {0.6, 0.35, 0.22}};
const std::vector<std::pair<Vec3, Vec3>> kPairs{{{0.26, 0.3, 0.7}, {0.75, 0.62, 0.35}},
                                                {{0.75, 0.5, 0.5}, {0.3, 0.7, 0.3}},
                                                {{0.5, 0.8, 0.4}, {0.6, 0.35, 0.22}}};
const std::vector<int> kLevels{16, 24, 32, 48};

double check_err(const Indicator& ind, const char* name) {
    const Check* c = ind.check(name);
    if (!c) throw Error(E_ARG, std::string("missing check ") + name);
    return c->rel_err();
}

void c1_oracle() {
    Problem p(8, kBallPlus);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1, 1);
    double worst = 0;
    for (int t = 0; t < 20; ++t) {
        BField f(p.g.n_boundary());
        for (double& v : f) v = U(rng);
        Field a = p.op->solve(f, nullptr), b = dense_oracle_solve(*p.op, f, nullptr);
        double d = 0, m = 0;
        for (std::size_t l = 0; l < a.size(); ++l) {
            d = std::max(d, std::abs(a[l] - b[l]));
            m = std::max(m, std::abs(b[l]));
        }
        worst = std::max(worst, d / m);
    }
    verdict(1, worst <= 1e-10, fmt("sparse vs dense solver on 8^3, 20 random data: max rel Linf %.2e (<= 1e-10)", worst));
}

// worst relative residual per grid; passes when the 32^3 value is within budget and the fitted order is >= 1.5
void refinement(int id, const char* name, const std::function<double(Problem&)>& residual) {
    std::vector<double> h, e;
    for (int n : kLevels) {
        Problem p(n, kBallPlus);
        h.push_back(p.g.h[0]);
        e.push_back(residual(p));
    }
    double ord = fit_rate(h, e).exponent;
    verdict(id, e[2] <= 3e-2 && ord >= 1.5,
            fmt("%s: residual %.2e / %.2e / %.2e / %.2e on 16/24/32/48, 32^3 <= 3e-2, order %.2f (>= 1.5)", name,
                e[0], e[1], e[2], e[3], ord));
}

void c2_decomposition() {
    refinement(2, "decomposition identity at 5 points", [](Problem& p) {
        double m = 0;
        for (const auto& x0 : kProbes) {
            ProbeFields px(*p.op, snap_probe(p.g, x0));
            m = std::max(m, check_err(ips_decomposition(*p.op, px), "decomposition"));
        }
        return m;
    });
}

void c3_lifting() {
    refinement(3, "lifted decomposition at 3 pairs y != x", [](Problem& p) {
        double m = 0;
        for (const auto& [x0, y0] : kPairs) {
            ProbeFields px(*p.op, snap_probe(p.g, x0)), py(*p.op, snap_probe(p.g, y0));
            m = std::max(m, check_err(ips_decomposition(*p.op, px, py), "lifted_decomposition"));
        }
        return m;
    });
}

void c4_symmetry() {
    Problem p(32, kBallPlus);
    double a = 0, b = 0;
    for (const auto& [x0, y0] : kPairs) {
        ProbeFields px(*p.op, snap_probe(p.g, x0)), py(*p.op, snap_probe(p.g, y0));
        auto I = probe_lifting(*p.op, px, py);
        a = std::max(a, check_err(I, "swap_energy_form"));
        auto I1 = i1_indicator(*p.op, px, py);
        b = std::max({b, check_err(I1, "swap_dtn_form"), check_err(I1, "swap_exterior_form")});
    }
    verdict(4, a <= 1e-9 && b <= 1e-3,
            fmt("swap asymmetry at 32^3, 3 pairs: I(x,y) %.2e (<= 1e-9), I1(x,y) %.2e (<= 1e-3)", a, b));
}

void c5_harmonicity() {
    Problem p(32, kBallPlus);
    double h = p.g.h[0], worst = 0;
    for (const auto& [x0, y0] : kPairs) {
        ProbeFields px(*p.op, snap_probe(p.g, x0));
        Vec3 y = snap_probe(p.g, y0);
        auto val = [&](const Vec3& q) {
            ProbeFields py(*p.op, q);
            return probe_lifting(*p.op, px, py).value;
        };
        // spacing of one cell keeps every stencil point a cell center
        double c = val(y), lap = -6 * c;
        for (int a = 0; a < 3; ++a) {
            Vec3 u = y, d = y;
            u[a] += h;
            d[a] -= h;
            lap += val(u) + val(d);
        }
        worst = std::max(worst, std::abs(lap) / std::abs(c));  // = |Lap_h I| h^2 / |I|
    }
    verdict(5, worst <= 10 * h * h,
            fmt("7-point Laplacian of I(x,.) at 3 points, |Lap I| h^2/|I| = %.2e (<= 10 h^2 = %.2e)", worst, 10 * h * h));
}

struct LineData {
    std::vector<double> d;
    std::vector<double> I, divw, Istar, weak;
};

// approach along +x toward the ball surface point (0.7, 0.5, 0.5); points closer than one cell are left out
LineData approach_line(int n, const ObstacleSpec& ob) {
    Problem p(n, ob);
    LineData L;
    double h = p.g.h[0];
    for (int k = 12; k >= 0; --k) {
        double want = 0.7 + (k + 0.5) * h;
        Vec3 x = snap_probe(p.g, {want, 0.5, 0.5});
        double d = x[0] - 0.7;
        if (d < h || (!L.d.empty() && d >= L.d.back()) || d > 0.3) continue;
        ProbeFields px(*p.op, x);
        L.d.push_back(d);
        L.I.push_back(probe_indicator_direct(*p.op, px).value);
        L.divw.push_back(ssm_indicator(*p.op, px, px).value);
        L.Istar.push_back(cim_indicator(*p.op, px).value);
        L.weak.push_back(weak_kernel_indicator(*p.op, x).value);
    }
    return L;
}

void c6_blowup(const LineData& plus, const LineData& minus) {
    bool ok = true;
    std::string msg;
    for (int s = 0; s < 2; ++s) {
        const LineData& L = s ? minus : plus;
        int sign = s ? -1 : 1;
        const char* nm[3] = {"I", "div w", "I*"};
        const std::vector<double>* v[3] = {&L.I, &L.divw, &L.Istar};
        for (int m = 0; m < 3; ++m) {
            auto f = fit_rate(L.d, *v[m]);
            bool mono = monotone_tail(*v[m], sign, 5);
            bool good = mono && f.sign == sign && !f.sign_split && f.exponent <= -0.85;
            ok = ok && good;
            msg += fmt("%s%s %.2f%s", m == 0 ? "" : ", ", nm[m], f.exponent, good ? "" : "(bad)");
        }
        msg += s ? " [V=-3]" : " [V=+5]; ";
    }
    verdict(6, ok, fmt("approach lines at 48^3, %zu points each, monotone last 5 with sign, exponents %s (<= -0.85)",
                       plus.d.size(), msg.c_str()));
}

void c7_boundedness() {
    double m[2][2];
    for (int r = 0; r < 2; ++r) {
        Problem p(r ? 48 : 32, kBallPlus);
        m[r][0] = m[r][1] = 0;
        for (double a : {0.15, 0.5, 0.85})
            for (double b : {0.15, 0.5, 0.85})
                for (double c : {0.15, 0.5, 0.85}) {
                    Vec3 x0{a, b, c};
                    if (distance_to_obstacle_boundary(kBallPlus, x0) < 0.15) continue;
                    ProbeFields px(*p.op, snap_probe(p.g, x0));
                    double I = probe_indicator_direct(*p.op, px).value;
                    m[r][0] = std::max(m[r][0], std::abs(cim_indicator(*p.op, px).value - I));
                    m[r][1] = std::max(m[r][1], std::abs(ssm_indicator(*p.op, px, px).value - I));
                }
    }
    double c0 = std::abs(m[1][0] - m[0][0]) / m[0][0], c1 = std::abs(m[1][1] - m[0][1]) / m[0][1];
    verdict(7, c0 <= 0.2 && c1 <= 0.2,
            fmt("margin-0.15 compact: max|I*-I| %.3e -> %.3e (change %.1f%%), max|div w - I| %.3e -> %.3e (change "
                "%.1f%%), 32^3 -> 48^3 (<= 20%%)",
                m[0][0], m[1][0], 100 * c0, m[0][1], m[1][1], 100 * c1));
}

// window d <= 0.15: farther out the weak kernel still carries its smooth far-field decay
void c8_negative_control(const LineData& all) {
    LineData L;
    for (std::size_t k = 0; k < all.d.size(); ++k)
        if (all.d[k] <= 0.15) {
            L.d.push_back(all.d[k]);
            L.I.push_back(all.I[k]);
            L.weak.push_back(all.weak[k]);
        }
    std::size_t mid = L.d.size() / 2;
    double lo = 1e300, hi = 0;
    for (double w : L.weak) {
        lo = std::min(lo, w / L.weak[mid]);
        hi = std::max(hi, w / L.weak[mid]);
    }
    double growth = L.I.back() / L.I.front();
    verdict(8, growth >= 10 && lo >= 0.5 && hi <= 2.0,
            fmt("same line, %zu points with h <= d <= 0.15: I grows x%.1f (>= 10), weak-kernel indicator within [%.2f, %.2f] of its mid value "
                "(within factor 2)",
                L.d.size(), growth, lo, hi));
}

// the shared needle fixture: a ball near the top face
const ObstacleSpec kTopPlus = ball({0.5, 0.5, 0.8}, 0.1, 1, 5.0);
const ObstacleSpec kTopMinus = ball({0.5, 0.5, 0.8}, 0.1, -1, 3.0);

void c9_limits(Problem& p) {
    Needle sx = make_needle(p.g.ext, {0, 0.5, 0.8}, {}, {0.2, 0.5, 0.8});
    Needle sy = make_needle(p.g.ext, {0, 0.4, 0.7}, {}, {0.2, 0.4, 0.7});
    auto qx = generate_needle_sequences(*p.op, sx, {0, 1, 2});
    auto qy = generate_needle_sequences(*p.op, sy, {0, 1, 2});
    bool ok = true;
    std::string msg;
    for (auto m : {LimitMode::Probe, LimitMode::Ssm, LimitMode::Cim, LimitMode::LiftProbe, LimitMode::LiftSsm}) {
        bool lift = m == LimitMode::LiftProbe || m == LimitMode::LiftSsm;
        auto s = dtn_limit_estimator(*p.op, qx, m, lift ? &qy : nullptr);
        int nu = s.usable_levels();
        // last 3 levels: two decreasing steps
        bool good = nu >= 3 && s.final_rel_err() <= 0.10 && s.error_decreasing(2);
        ok = ok && good;
        msg += fmt("%s%s %.1f%% at level %d/%zu%s", msg.empty() ? "" : ", ", limit_mode_name(m),
                   100 * s.final_rel_err(), nu, s.rel_err.size(), good ? "" : " (bad)");
    }
    verdict(9, ok,
            fmt("needles 0.2 from D at 32^3, error at the last usable level: %s (<= 10%%, decreasing over last 3)",
                msg.c_str()));
}

struct SideB {
    bool hits_ok = true, miss_ok = true, norms_ok = true;
    std::string hits, miss, norms;
};

void side_b_needles(Problem& plus, Problem& minus, SideB& r) {
    const SchrodingerOperator* ops[2] = {plus.op.get(), minus.op.get()};
    const Mask* inD[2] = {&plus.P.inD, &minus.P.inD};
    std::vector<Needle> hit{make_needle(plus.g.ext, {0.5, 0.5, 1.0}, {}, {0.5, 0.5, 0.8}),
                            make_needle(plus.g.ext, {0.4, 0.6, 1.0}, {{0.45, 0.55, 0.9}}, {0.5, 0.5, 0.8})};
    double min_growth = 1e300, min_l2 = 1e300;
    int bad = 0, bad_norm = 0;
    for (const auto& s : hit) {
        auto seqs = generate_needle_sequences(*plus.op, s, {0, 1, 2});
        for (const auto& q : seqs) {
            // norms of v_n over D; only levels whose fit met its target count
            auto rows = needle_norm_series(plus.g, q, plus.P.inD);
            std::vector<double> l2, ratio;
            for (std::size_t k = 0; k < rows.size(); ++k)
                if (q.levels[k].discrepancy_ok && q.levels[k].resolved) {
                    l2.push_back(rows[k].l2);
                    ratio.push_back(rows[k].ratio);
                } else {
                    break;
                }
            bool dec = ratio.size() >= 3;
            for (std::size_t k = ratio.size() >= 3 ? ratio.size() - 2 : 1; k < ratio.size(); ++k)
                dec = dec && ratio[k] < ratio[k - 1];
            double g2 = l2.empty() ? 0 : l2.back() / l2.front();
            min_l2 = std::min(min_l2, g2);
            if (!(g2 >= 4 && dec)) ++bad_norm;
            for (int sg = 0; sg < 2; ++sg) {
                auto set = indicator_sequences(*ops[sg], q, *inD[sg]);
                for (auto m : {SeqMethod::Probe, SeqMethod::Ssm, SeqMethod::Cim}) {
                    const auto& is = set.get(m);
                    auto j = judge_series(is.values(), is.usable());
                    int want = sg ? -1 : 1;
                    if (j.trend != Trend::Diverges || j.sign != want) ++bad;
                    min_growth = std::min(min_growth, j.growth);
                }
            }
        }
    }
    r.hits_ok = bad == 0;
    r.hits = fmt("hit needles: %d of 36 series fail, min growth x%.0f", bad, min_growth);
    r.norms_ok = bad_norm == 0;
    r.norms = fmt("2 hit needles x 3 components: %d fail, min L2(D) growth x%.0f", bad_norm, min_l2);

    // a needle avoiding D: the indicator sums over the components must settle
    Needle miss = make_needle(plus.g.ext, {0, 0.5, 0.8}, {}, {0.2, 0.5, 0.8});
    auto seqs = generate_needle_sequences(*plus.op, miss, {0, 1, 2});
    double worst = 0;
    int bad_miss = 0;
    for (int sg = 0; sg < 2; ++sg) {
        std::vector<SequenceSet> sets;
        for (const auto& q : seqs) sets.push_back(indicator_sequences(*ops[sg], q, *inD[sg]));
        for (auto m : {SeqMethod::Probe, SeqMethod::Ssm, SeqMethod::Cim}) {
            std::size_t nl = sets[0].get(m).levels.size();
            std::vector<double> v;
            std::vector<bool> u;
            for (std::size_t k = 0; k < nl; ++k) {
                double s = 0;
                bool ok = true;
                for (const auto& set : sets) {
                    s += set.get(m).levels[k].value;
                    ok = ok && set.get(m).levels[k].usable;
                }
                v.push_back(s);
                u.push_back(ok);
            }
            auto j = judge_series(v, u);
            worst = std::max(worst, j.spread);
            if (j.trend != Trend::Converges) ++bad_miss;
        }
    }
    r.miss_ok = bad_miss == 0;
    r.miss = fmt("miss needle: last-3 spread %.1f%% worst (<= 10%%)", 100 * worst);
}

struct BatteryResult {
    int verdicts = 0, wrong = 0, bad_inconclusive = 0, inconclusive_near = 0, cross_j = 0;
};

BatteryResult battery(Problem& plus, Problem& minus) {
    const std::vector<Vec3> pts{{0.5, 0.5, 0.8},   {0.47, 0.52, 0.83}, {0.53, 0.48, 0.78}, {0.52, 0.52, 0.86},
                                {0.2, 0.5, 0.8},   {0.8, 0.5, 0.8},    {0.5, 0.2, 0.8},    {0.5, 0.8, 0.75},
                                {0.15, 0.15, 0.85}, {0.85, 0.8, 0.6},  {0.7, 0.3, 0.85},   {0.2, 0.75, 0.7}};
    const SchrodingerOperator* ops[2] = {plus.op.get(), minus.op.get()};
    const Mask* inD[2] = {&plus.P.inD, &minus.P.inD};
    double h = plus.g.h[0];
    BatteryResult r;
    for (const auto& x0 : pts) {
        Vec3 x = snap_probe(plus.g, x0);
        double dD = distance_to_obstacle_boundary(kTopPlus, x);
        auto needles = spread_needles(plus.g, x);
        std::vector<std::vector<NeedleSequence>> seqs;
        for (const auto& s : needles) seqs.push_back(generate_needle_sequences(*plus.op, s, {0, 1, 2}));
        std::string line = fmt("  x=(%.3f %.3f %.3f) dist %+.3f:", x[0], x[1], x[2], dD);
        for (int sg = 0; sg < 2; ++sg) {
            Verdict first[3]{};
            for (int j = 0; j < 3; ++j) {
                std::vector<SequenceSet> sets;
                for (const auto& s : seqs) sets.push_back(indicator_sequences(*ops[sg], s[j], *inD[sg]));
                std::vector<const SequenceSet*> ptr;
                for (const auto& s : sets) ptr.push_back(&s);
                int mi = 0;
                for (auto m : {SeqMethod::Probe, SeqMethod::Ssm, SeqMethod::Cim}) {
                    auto v = decide(x, needles, ptr, m, j);
                    ++r.verdicts;
                    if (j == 0) first[mi] = v.verdict;
                    else if (v.verdict != first[mi]) ++r.cross_j;
                    ++mi;
                    if (v.verdict == Verdict::Inconclusive) {
                        if (std::abs(dD) <= 2 * h) ++r.inconclusive_near;
                        else {
                            ++r.bad_inconclusive;
                            line += fmt(" [inconclusive %s %s j%d]", sg ? "V-" : "V+", method_name(m), j + 1);
                        }
                    } else if ((v.verdict == Verdict::InsideDbar) != (dD <= 0)) {
                        ++r.wrong;
                    }
                    if (m == SeqMethod::Probe && sg == 0) line += std::string(" ") + verdict_name(v.verdict);
                }
            }
        }
        std::printf("%s\n", line.c_str());
        std::fflush(stdout);
    }
    return r;
}

void c10_integrated() {
    Problem p(32, kBallPlus);
    double e[3] = {0, 0, 0};
    for (const auto& x0 : kProbes) {
        ProbeFields px(*p.op, snap_probe(p.g, x0));
        auto c = cim_indicator(*p.op, px);
        e[0] = std::max(e[0], check_err(c, "relation_probe"));
        e[1] = std::max(e[1], check_err(c, "divergence"));
        e[2] = std::max(e[2], check_err(c, "relation_divergence"));
    }
    bool ok = e[0] <= 3e-2 && e[1] <= 3e-2 && e[2] <= 3e-2;
    verdict(10, ok,
            fmt("completely integrated relations at 5 points, 32^3: I* vs I relation %.2e, I* = div w* %.2e, div w* "
                "relation %.2e (<= 3e-2)",
                e[0], e[1], e[2]));
}

void c13_c14_rates() {
    ExperimentConfig c = parse_config(R"({"grid": {"n": 32}})");
    auto r = run_rates(c, 1);
    bool cone = true;
    std::string cm;
    for (const auto& [name, f] : r.fits)
        if (name.rfind("cone", 0) == 0) {
            cone = cone && std::abs(f.exponent + 1) <= 0.05;
            cm += fmt("%s%.3f", cm.empty() ? "" : " ", f.exponent);
        }
    verdict(13, cone && r.sphere_rel_err <= 0.01,
            fmt("cone exponents %s (-1 +- 0.05), full sphere closed form rel err %.1e (<= 1e-2)", cm.c_str(),
                r.sphere_rel_err));
    double ee = 0, br = 0;
    for (const auto& [name, f] : r.fits) {
        if (name == "exterior_energy") ee = f.exponent;
        if (name == "boundary_exterior_ratio") br = f.exponent;
    }
    verdict(14, std::abs(ee + 3) <= 0.1 && br >= 0.4 && r.i1_monotone,
            fmt("exterior energy exponent %.3f (-3 +- 0.1), boundary/exterior ratio exponent %.3f (>= 0.4), I1 %s "
                "toward the face over the last 5 points (%.3e -> %.3e)",
                ee, br, r.i1_monotone ? "decreasing" : "NOT decreasing", r.i1_v.front(), r.i1_v.back()));
}

void c15_jump() {
    double a[2];
    for (int s = 0; s < 2; ++s) {
        Problem p(48, s ? kBallMinus : kBallPlus);
        double h = p.g.h[0];
        std::vector<Vec3> line;
        std::vector<double> d;
        for (int k = 8; k >= 0; --k) {
            Vec3 x = snap_probe(p.g, {0.7 + (k + 0.5) * h, 0.5, 0.5});
            if (x[0] - 0.7 < 0.5 * h) continue;
            line.push_back(x);
            d.push_back(x[0] - 0.7);
        }
        a[s] = jump_magnitude_estimate(*p.op, p.P.inD, line, d).alpha;
    }
    double e0 = std::abs(a[0] - 5) / 5, e1 = std::abs(a[1] + 3) / 3;
    verdict(15, e0 <= 0.1 && e1 <= 0.1,
            fmt("jump estimate at 48^3: %.3f for +5 (%.1f%%), %.3f for -3 (%.1f%%) (within 10%%)", a[0], 100 * e0, a[1],
                100 * e1));
}

std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void c16_determinism() {
    ExperimentConfig c = parse_config(R"({
      "name": "determinism", "grid": {"n": 16}, "seed": 3,
      "obstacle": {"shapes": [{"kind": "ball", "center": [0.5, 0.5, 0.5], "radius": 0.2, "sign": 1, "amp": 5}]},
      "methods": ["probe", "ssm", "cim", "weak"],
      "points": [{"type": "line", "name": "line", "target": [0.7, 0.5, 0.5], "direction": [1, 0, 0],
                  "distances": {"from": 0.25, "to": 0.03, "count": 8}},
                 {"type": "lattice", "name": "lattice", "lo": [0.2, 0.2, 0.2], "hi": [0.8, 0.8, 0.8],
                  "count": [2, 2, 2], "margin_obstacle": 0.1}]})");
    namespace fs = std::filesystem;
    fs::path base = fs::temp_directory_path() / fmt("ips_determinism_%d", int(::getpid()));
    std::vector<std::string> csv;
    for (int t : {1, 4, 8}) {
        auto dir = (base / std::to_string(t)).string();
        emit_report(run_scan(c, t), dir);
        csv.push_back(slurp(dir + "/points.csv") + slurp(dir + "/fits.csv"));
    }
    fs::remove_all(base);
    bool same = csv[0] == csv[1] && csv[0] == csv[2] && !csv[0].empty();
    verdict(16, same, fmt("scan CSV with 1, 4 and 8 threads: %s (%zu bytes)", same ? "byte-identical" : "DIFFERENT",
                          csv[0].size()));
}

}  // namespace

int main(int argc, char** argv) {
    // optional list of criterion numbers to run
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    auto want = [&](int k) { return only.empty() || std::find(only.begin(), only.end(), k) != only.end(); };
    auto t0 = std::chrono::steady_clock::now();
    try {
        if (want(1)) c1_oracle();
        if (want(2)) c2_decomposition();
        if (want(3)) c3_lifting();
        if (want(4)) c4_symmetry();
        if (want(5)) c5_harmonicity();
        if (want(6) || want(8)) {
            auto plus = approach_line(48, kBallPlus);
            if (want(6)) c6_blowup(plus, approach_line(48, kBallMinus));
            if (want(8)) c8_negative_control(plus);
        }
        if (want(7)) c7_boundedness();
        if (want(9) || want(11) || want(12)) {
            Problem plus(32, kTopPlus), minus(32, kTopMinus);
            if (want(9)) c9_limits(plus);
            if (want(11) || want(12)) {
                SideB sb;
                side_b_needles(plus, minus, sb);
                BatteryResult b;
                if (want(11)) b = battery(plus, minus);
                if (want(11)) {
                    bool ok = sb.hits_ok && sb.miss_ok && b.wrong == 0 && b.bad_inconclusive == 0;
                    verdict(11, ok,
                            fmt("%s; %s; battery of 12 points x 18 verdicts: %d wrong, %d inconclusive beyond 2h, %d "
                                "inconclusive within 2h, %d cross-component disagreements",
                                sb.hits.c_str(), sb.miss.c_str(), b.wrong, b.bad_inconclusive, b.inconclusive_near,
                                b.cross_j));
                }
                if (want(12)) verdict(12, sb.norms_ok, sb.norms + ", L1/L2 decreasing over the last 3 levels");
            }
        }
        if (want(10)) c10_integrated();
        if (want(13) || want(14)) c13_c14_rates();
        if (want(15)) c15_jump();
        if (want(16)) c16_determinism();
    } catch (const std::exception& e) {
        std::printf("FAIL aborted: %s\n", e.what());
        return 2;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d criteria failed, %.0f s\n", failures, secs);
    return failures ? 1 : 0;
}
