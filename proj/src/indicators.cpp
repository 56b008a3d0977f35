#include "indicators.hpp"

#include <algorithm>
#include <cmath>

#include "dtn_difference.hpp"

namespace ips {

double Check::rel_err() const {
    double s = std::max(std::abs(lhs), std::abs(rhs));
    return s > 0 ? abs_err() / s : 0.0;
}

const Check* Indicator::check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

double v_pair(const SchrodingerOperator& op, const Field& a, const Field& b) {
    const auto& g = op.grid();
    const auto& V = op.V();
    double s = 0;
    for (auto l : g.interior)
        if (V[l] != 0) s += V[l] * a[l] * b[l];
    return s * g.cell();
}

double v_pair(const SchrodingerOperator& op, const VField& a, const VField& b) {
    return v_pair(op, a[0], b[0]) + v_pair(op, a[1], b[1]) + v_pair(op, a[2], b[2]);
}

double energy_pair(const SchrodingerOperator& op, const VField& a, const VField& b) {
    double s = 0;
    for (int j = 0; j < 3; ++j) s += energy_form(op.grid(), a[j], b[j], &op.V());
    return s;
}

double flux_pair(const GridSpec& g, const VField& a, const VField& b) {
    double s = 0;
    for (int j = 0; j < 3; ++j) s += pairing_of_solution(g, a[j], trace(g, b[j]));
    return s;
}

double dtn_difference_pair(ProbeFields& px, ProbeFields& py) {
    // the V = 0 extension of the trace of grad G(.-x) is -H
    return flux_pair(px.grid(), px.w1(), py.gG()) + flux_pair(px.grid(), px.H(), py.gG());
}

KernelTerms kernel_terms(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol) {
    KernelTerms k;
    auto s = exterior_hess_energy_surface(ext, x, y, std::min(rtol, 1e-6));
    k.S = -s.value;
    auto e = exterior_hess_energy(ext, x, y, rtol);
    k.E = e.value;
    k.ok = s.ok && e.ok;
    return k;
}

double point_divergence(const GridSpec& g, const VField& w, const Vec3& y) {
    double s = std::min({g.h[0], g.h[1], g.h[2]});
    return divergence_at(g, w, y, s);
}

std::vector<std::string> proximity_flags(const GridSpec& g, const ObstacleSpec* ob, const Vec3& y) {
    std::vector<std::string> f;
    double h = std::max({g.h[0], g.h[1], g.h[2]});
    if (g.dist_to_boundary(y) < 3 * h) f.push_back("near_box_boundary");
    if (ob && !ob->shapes.empty()) {
        double d = distance_to_obstacle_boundary(*ob, y);
        if (d <= 0) f.push_back("inside_obstacle");
        else if (d < 3 * h) f.push_back("near_obstacle");
    }
    return f;
}

static VField add(const VField& a, const VField& b) {
    VField r = a;
    for (int j = 0; j < 3; ++j)
        for (std::size_t l = 0; l < r[j].size(); ++l) r[j][l] += b[j][l];
    return r;
}

static void flag_points(Indicator& r, const GridSpec& g, const Vec3& x) {
    for (auto& f : proximity_flags(g, nullptr, x)) r.flags.push_back(f);
}

Indicator probe_indicator_direct(const SchrodingerOperator& op, ProbeFields& px) {
    Indicator r;
    r.method = "direct";
    const auto& w = px.w();
    const auto& gG = px.gG();
    double v_gg = v_pair(op, gG, gG);
    r.value = v_gg + v_pair(op, w, gG);
    r.checks.push_back({"energy_form", r.value, -energy_pair(op, w, w) + v_gg});
    return r;
}

Indicator probe_lifting(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py) {
    Indicator r;
    r.method = "energy_form";
    const auto &wx = px.w(), &wy = py.w();
    double sym = -energy_pair(op, wx, wy) + v_pair(op, px.gG(), py.gG());
    double sym_swap = -energy_pair(op, wy, wx) + v_pair(op, py.gG(), px.gG());
    double direct = v_pair(op, add(wx, px.gG()), py.gG());
    double direct_swap = v_pair(op, add(wy, py.gG()), px.gG());
    r.value = sym;
    r.checks.push_back({"direct_form", sym, direct});
    r.checks.push_back({"swap_energy_form", sym, sym_swap});
    r.checks.push_back({"swap_direct_form", direct, direct_swap});
    return r;
}

Indicator ssm_indicator(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py) {
    Indicator r;
    r.method = "representation";
    const auto& g = op.grid();
    const auto& wx = px.w();
    double flux = flux_pair(g, wx, py.gG());
    double lift_direct = v_pair(op, add(wx, px.gG()), py.gG());
    r.value = -flux + lift_direct;
    double diff = point_divergence(g, wx, py.x());
    r.checks.push_back({"direct_divergence", r.value, diff});
    // lifting = divergence + flux, with the symmetric form of the lifting and the differenced divergence
    double lift_sym = -energy_pair(op, wx, py.w()) + v_pair(op, px.gG(), py.gG());
    r.checks.push_back({"lifting_relation", lift_sym, diff + flux});
    flag_points(r, g, py.x());
    return r;
}

Indicator i1_indicator(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py, const IndicatorOptions& o) {
    Indicator r;
    r.method = "dtn";
    const auto& g = op.grid();
    const auto &ax = px.w1(), &ay = py.w1();
    double a_xy = energy_pair(op, ax, ay);
    double a_yx = energy_pair(op, ay, ax);
    auto sxy = exterior_hess_energy_surface(g.ext, px.x(), py.x(), std::min(o.quad_rtol, 1e-6));
    auto syx = exterior_hess_energy_surface(g.ext, py.x(), px.x(), std::min(o.quad_rtol, 1e-6));
    // the surface routine returns the negated pairing
    double S_xy = -sxy.value, S_yx = -syx.value;
    double dtn = S_yx - flux_pair(g, ax, py.gG());
    double dtn_swap = S_xy - flux_pair(g, ay, px.gG());
    double surf = -a_xy + S_xy;
    r.value = dtn;
    r.checks.push_back({"surface_form", dtn, surf});
    r.checks.push_back({"swap_dtn_form", dtn, dtn_swap});
    if (!sxy.ok || !syx.ok) r.flags.push_back("surface_quadrature_tolerance");
    if (o.exterior_volume) {
        auto exy = exterior_hess_energy(g.ext, px.x(), py.x(), o.quad_rtol);
        auto eyx = exterior_hess_energy(g.ext, py.x(), px.x(), o.quad_rtol);
        double ext_form = -a_xy - exy.value;
        r.checks.push_back({"exterior_form", dtn, ext_form});
        r.checks.push_back({"swap_exterior_form", ext_form, -a_yx - eyx.value});
        if (!exy.ok || !eyx.ok) r.flags.push_back("exterior_quadrature_tolerance");
    }
    return r;
}

Indicator ips_decomposition(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o) {
    Indicator r;
    r.method = "direct_divergence";
    const auto& g = op.grid();
    double lhs = point_divergence(g, px.w(), px.x()) + point_divergence(g, px.w1(), px.x());
    double I = probe_indicator_direct(op, px).value;
    IndicatorOptions oo = o;
    oo.exterior_volume = false;
    double I1 = i1_indicator(op, px, px, oo).value;
    r.value = lhs;
    r.checks.push_back({"decomposition", lhs, I + I1});
    flag_points(r, g, px.x());
    return r;
}

Indicator ips_decomposition(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py,
                            const IndicatorOptions& o) {
    Indicator r;
    r.method = "direct_divergence";
    const auto& g = op.grid();
    double lhs = point_divergence(g, px.w(), py.x()) + point_divergence(g, px.w1(), py.x());
    double I = probe_lifting(op, px, py).value;
    IndicatorOptions oo = o;
    oo.exterior_volume = false;
    double I1 = i1_indicator(op, px, py, oo).value;
    double surf = flux_pair(g, py.w(), px.gG()) - flux_pair(g, px.w(), py.gG());
    r.value = lhs;
    r.checks.push_back({"lifted_decomposition", lhs, I + I1 + surf});
    flag_points(r, g, py.x());
    return r;
}

Indicator ips_function(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o) {
    Indicator r;
    r.method = "direct_divergence";
    const auto& g = op.grid();
    const auto& W = px.W();
    r.value = point_divergence(g, W, px.x());
    auto e = exterior_hess_energy(g.ext, px.x(), px.x(), o.quad_rtol);
    double energy = -energy_pair(op, W, W) + v_pair(op, px.gG(), px.gG()) - e.value;
    r.checks.push_back({"energy_form", r.value, energy});
    r.checks.push_back(
        {"split_divergence", r.value, point_divergence(g, px.w(), px.x()) + point_divergence(g, px.w1(), px.x())});
    double dev = 0, sc = 0;
    for (int j = 0; j < 3; ++j)
        for (std::size_t l = 0; l < W[j].size(); ++l) {
            dev = std::max(dev, std::abs(W[j][l] - px.w()[j][l] - px.w1()[j][l]));
            sc = std::max(sc, std::abs(W[j][l]));
        }
    r.checks.push_back({"superposition", sc, sc + dev});
    if (!e.ok) r.flags.push_back("exterior_quadrature_tolerance");
    flag_points(r, g, px.x());
    return r;
}

Indicator integro_differential_check(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py,
                                     const IndicatorOptions& o) {
    Indicator r;
    r.method = "symmetrized_divergence";
    const auto& g = op.grid();
    double sym = 0.5 * (point_divergence(g, px.W(), py.x()) + point_divergence(g, py.W(), px.x()));
    double lhs = sym + energy_pair(op, px.W(), py.W());
    auto e = exterior_hess_energy(g.ext, px.x(), py.x(), o.quad_rtol);
    double rhs = v_pair(op, px.gG(), py.gG()) - e.value;
    r.value = lhs;
    r.checks.push_back({"integro_differential", lhs, rhs});
    // w_x has zero trace and w1_y is V-harmonic, so their energy pairing vanishes
    double orth = energy_pair(op, px.w(), py.w1());
    double scale = std::sqrt(std::abs(energy_pair(op, px.w(), px.w())) * std::abs(energy_pair(op, py.w1(), py.w1())));
    r.checks.push_back({"orthogonality", scale, scale + orth});
    if (!e.ok) r.flags.push_back("exterior_quadrature_tolerance");
    return r;
}

Indicator cim_indicator(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o) {
    Indicator r;
    r.method = "direct";
    const auto& g = op.grid();
    VField q = add(px.gG(), px.H());
    const auto& ws = px.wstar();
    r.value = v_pair(op, q, q) + v_pair(op, ws, q);
    double div_ws = point_divergence(g, ws, px.x());
    double div_w = point_divergence(g, px.w(), px.x());
    double I = probe_indicator_direct(op, px).value;
    IndicatorOptions oo = o;
    oo.exterior_volume = false;
    double I1 = i1_indicator(op, px, px, oo).value;
    // the divergence of w1 at x is nearly I1, so the difference is taken from its termwise split;
    // differencing w1 would leave an error comparable to the cim value itself
    auto sp = w1_divergence_split(op, px, o);
    double div_w1 = sp.dtn + sp.surface + sp.volume;
    double P = dtn_difference_pair(px, px);
    double P_ale = -v_pair(op, px.w1(), px.H());
    r.checks.push_back({"divergence", r.value, div_ws});
    r.checks.push_back({"relation_probe", r.value, I + 2 * (I1 - div_w1) + P});
    r.checks.push_back({"relation_divergence", div_ws, div_w + (I1 - div_w1) + P});
    r.checks.push_back({"w1_split", div_w1, sp.direct});
    r.checks.push_back({"alessandrini", P, P_ale});
    flag_points(r, g, px.x());
    return r;
}

Indicator weak_kernel_indicator(const SchrodingerOperator& op, const Vec3& x) {
    Indicator r;
    r.method = "direct";
    auto Gx = sample_G(op.grid(), x);
    auto w = solve_w_scalar(op, Gx);
    double vgg = v_pair(op, Gx, Gx);
    r.value = vgg + v_pair(op, w, Gx);
    r.checks.push_back({"energy_form", r.value, -energy_form(op.grid(), w, w, &op.V()) + vgg});
    return r;
}

W1Split w1_divergence_split(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o) {
    W1Split s;
    const auto& g = op.grid();
    s.dtn = -flux_pair(g, px.w1(), px.gG());
    s.surface = -exterior_hess_energy_surface(g.ext, px.x(), px.x(), std::min(o.quad_rtol, 1e-6)).value;
    s.volume = v_pair(op, px.w1(), px.gG());
    s.direct = point_divergence(g, px.w1(), px.x());
    return s;
}

JumpEstimate jump_magnitude_estimate(const SchrodingerOperator& op, const Mask& inD, const std::vector<Vec3>& line,
                                     const std::vector<double>& dist) {
    if (line.size() != dist.size() || line.size() < 3) throw Error(E_ARG, "need at least three line points");
    const auto& g = op.grid();
    JumpEstimate est;
    for (const auto& x : line) {
        ProbeFields px(op, x);
        double I = probe_indicator_direct(op, px).value;
        double J = 0;
        for (auto l : g.interior)
            if (inD[l])
                for (int j = 0; j < 3; ++j) J += px.gG()[j][l] * px.gG()[j][l];
        J *= g.cell();
        est.ratios.push_back(J > 0 ? I / J : 0.0);
    }
    std::size_t m = est.ratios.size();
    // quadratic in the distance through the last three points, evaluated at zero distance
    double d0 = dist[m - 3], d1 = dist[m - 2], d2 = dist[m - 1];
    double r0 = est.ratios[m - 3], r1 = est.ratios[m - 2], r2 = est.ratios[m - 1];
    double L0 = d1 * d2 / ((d0 - d1) * (d0 - d2));
    double L1 = d0 * d2 / ((d1 - d0) * (d1 - d2));
    double L2 = d0 * d1 / ((d2 - d0) * (d2 - d1));
    est.alpha = L0 * r0 + L1 * r1 + L2 * r2;
    if (!std::isfinite(est.alpha) || std::abs(est.alpha - r2) > 0.5 * std::abs(r2) + 1e-300) {
        est.converged = false;
        est.alpha = r2;
    }
    return est;
}

const char* limit_mode_name(LimitMode m) {
    switch (m) {
        case LimitMode::Probe: return "probe";
        case LimitMode::Ssm: return "ssm";
        case LimitMode::Cim: return "cim";
        case LimitMode::LiftProbe: return "lift_probe";
        case LimitMode::LiftSsm: return "lift_ssm";
    }
    return "?";
}

LimitMode parse_limit_mode(const std::string& s) {
    for (auto m : {LimitMode::Probe, LimitMode::Ssm, LimitMode::Cim, LimitMode::LiftProbe, LimitMode::LiftSsm})
        if (s == limit_mode_name(m)) return m;
    throw Error(E_CONFIG, "unknown estimator mode '" + s + "'");
}

int LimitSeries::usable_levels() const {
    std::size_t n = 0;
    while (n < rel_err.size() && (n >= usable.size() || usable[n])) ++n;
    return int(n);
}

double LimitSeries::final_rel_err() const {
    int n = usable_levels();
    return n ? rel_err[n - 1] : INFINITY;
}

bool LimitSeries::error_decreasing(int steps) const {
    int n = usable_levels();
    if (n < steps + 1) return false;
    for (int i = n - steps; i < n; ++i)
        if (!(rel_err[i] < rel_err[i - 1])) return false;
    return true;
}

static void check_triple(const std::vector<NeedleSequence>& s, const char* what) {
    if (s.size() != 3) throw Error(E_ARG, std::string(what) + ": need sequences for j = 0, 1, 2");
    for (int j = 0; j < 3; ++j) {
        if (s[j].j != j) throw Error(E_ARG, std::string(what) + ": sequences must be ordered by component");
        if (s[j].levels.size() != s[0].levels.size()) throw Error(E_ARG, std::string(what) + ": level counts differ");
    }
}

LimitSeries dtn_limit_estimator(const SchrodingerOperator& op, const std::vector<NeedleSequence>& sx, LimitMode mode,
                                const std::vector<NeedleSequence>* sy) {
    bool lift = mode == LimitMode::LiftProbe || mode == LimitMode::LiftSsm;
    check_triple(sx, "x");
    if (lift) {
        if (!sy) throw Error(E_ARG, "lifting modes need sequences at y");
        check_triple(*sy, "y");
        if (sy->front().levels.size() != sx.front().levels.size()) throw Error(E_ARG, "level counts differ");
    }
    const Vec3 x = sx[0].x, y = lift ? (*sy)[0].x : x;

    LimitSeries r;
    r.mode = mode;
    {
        ProbeFields px(op, x);
        if (lift) {
            ProbeFields py(op, y);
            r.target = mode == LimitMode::LiftProbe ? probe_lifting(op, px, py).value : ssm_indicator(op, px, py).value;
        } else if (mode == LimitMode::Probe) {
            r.target = probe_indicator_direct(op, px).value;
        } else if (mode == LimitMode::Ssm) {
            r.target = ssm_indicator(op, px, px).value;
        } else {
            r.target = cim_indicator(op, px).value;
        }
    }

    // interior form of the pairings, see indicator_sequences
    const std::size_t nl = sx[0].levels.size();
    std::vector<Field> th(3), ut(3);
    if (mode == LimitMode::Cim || mode == LimitMode::Ssm || mode == LimitMode::LiftSsm)
        for (int j = 0; j < 3; ++j) {
            const auto& other = lift ? (*sy)[j] : sx[j];
            th[j] = op.solve_laplace(other.target);
            if (mode == LimitMode::Cim) ut[j] = op.solve(sx[j].target, nullptr);
        }
    for (std::size_t L = 0; L < nl; ++L) {
        double val = 0;
        bool ok = true;
        for (int j = 0; j < 3; ++j) {
            const auto& a = sx[j].levels[L];
            ok = ok && a.discrepancy_ok && a.resolved;
            Field uf = op.solve(a.f, nullptr);
            const auto& b = (lift ? (*sy)[j] : sx[j]).levels[L];
            if (lift) ok = ok && b.discrepancy_ok && b.resolved;
            if (mode == LimitMode::Probe || mode == LimitMode::LiftProbe) {
                val += v_pair(op, uf, b.v);
                continue;
            }
            Field gh = th[j];
            for (std::size_t l = 0; l < gh.size(); ++l) gh[l] -= b.v[l];
            if (mode == LimitMode::Cim) {
                for (std::size_t l = 0; l < uf.size(); ++l) uf[l] = ut[j][l] - uf[l];
                val += v_pair(op, uf, gh);
            } else {
                val -= v_pair(op, uf, gh);
            }
        }
        r.delta.push_back(sx[0].levels[L].delta);
        r.value.push_back(val);
        r.usable.push_back(ok);
        double sc = std::abs(r.target);
        r.rel_err.push_back(sc > 0 ? std::abs(val - r.target) / sc : std::abs(val));
    }
    return r;
}

}  // namespace ips
