#include "sideb.hpp"

#include <algorithm>
#include <cmath>

#include "indicators.hpp"
#include "kernel.hpp"

namespace ips {

const char* method_name(SeqMethod m) {
    switch (m) {
        case SeqMethod::Probe: return "probe";
        case SeqMethod::Ssm: return "ssm";
        case SeqMethod::Cim: return "cim";
    }
    return "?";
}

SeqMethod parse_method(const std::string& s) {
    if (s == "probe") return SeqMethod::Probe;
    if (s == "ssm") return SeqMethod::Ssm;
    if (s == "cim") return SeqMethod::Cim;
    throw Error(E_CONFIG, "unknown method '" + s + "'");
}

std::vector<double> IndicatorSequence::values() const {
    std::vector<double> v;
    for (const auto& L : levels) v.push_back(L.value);
    return v;
}

std::vector<bool> IndicatorSequence::usable() const {
    std::vector<bool> v;
    for (const auto& L : levels) v.push_back(L.usable);
    return v;
}

const IndicatorSequence& SequenceSet::get(SeqMethod m) const {
    return m == SeqMethod::Probe ? probe : (m == SeqMethod::Ssm ? ssm : cim);
}

SequenceSet indicator_sequences(const SchrodingerOperator& op, const NeedleSequence& seq, const Mask& inD) {
    const auto& g = op.grid();
    SequenceSet r;
    for (auto* s : {&r.probe, &r.ssm, &r.cim}) {
        s->x = seq.x;
        s->j = seq.j;
    }
    r.probe.method = SeqMethod::Probe;
    r.ssm.method = SeqMethod::Ssm;
    r.cim.method = SeqMethod::Cim;

    // pairings use the interior form <(Lambda_V - Lambda_0) a, b> = h^3 sum V u_a v_b, with u_a the V solution
    // and v_b the harmonic extension. The boundary flux form cancels badly once the traces get large.
    const BField& t = seq.target;
    SolveStats st;
    Field th = op.solve_laplace(t, nullptr, &st);
    r.log.add(st);
    Field ut = op.solve(t, nullptr, &st);
    r.log.add(st);
    r.target_pairing = v_pair(op, ut, th);

    for (const auto& L : seq.levels) {
        // trace of G_n^j is t - f; its harmonic extension is th - v, and v - th = v + H^j
        Field gh = th;
        for (std::size_t l = 0; l < gh.size(); ++l) gh[l] -= L.v[l];
        Field uf = op.solve(L.f, nullptr, &st);
        r.log.add(st);
        Field ug = ut;
        for (std::size_t l = 0; l < ug.size(); ++l) ug[l] -= uf[l];

        SequenceLevel base;
        base.n = L.n;
        base.delta = L.delta;
        base.usable = L.discrepancy_ok && L.resolved;

        SequenceLevel p = base, s = base, c = base;
        p.value = p.identity = v_pair(op, uf, L.v);
        c.value = c.identity = v_pair(op, ug, gh);
        s.value = -v_pair(op, uf, gh);
        s.identity = 0.5 * (p.value + c.value - r.target_pairing);
        p.l2 = s.l2 = l2_norm(g, L.v, inD);
        p.l1 = s.l1 = l1_norm(g, L.v, inD);
        c.l2 = l2_norm(g, gh, inD);
        c.l1 = l1_norm(g, gh, inD);

        double scale = std::max({std::abs(p.value), std::abs(c.value), std::abs(r.target_pairing), 1e-300});
        r.ssm.identity_residual = std::max(r.ssm.identity_residual, std::abs(s.value - s.identity) / scale);
        r.probe.levels.push_back(p);
        r.ssm.levels.push_back(s);
        r.cim.levels.push_back(c);
    }
    return r;
}

IndicatorSequence indicator_sequence(const SchrodingerOperator& op, const NeedleSequence& seq, SeqMethod m,
                                     const Mask& inD) {
    return indicator_sequences(op, seq, inD).get(m);
}

double ComponentLimits::get(SeqMethod m) const {
    return m == SeqMethod::Probe ? probe : (m == SeqMethod::Ssm ? ssm : cim);
}

ComponentLimits sequence_limits(const SchrodingerOperator& op, ProbeFields& px, int j) {
    if (j < 0 || j > 2) throw Error(E_ARG, "component must be 0, 1 or 2");
    const auto& g = op.grid();
    const Field& gj = px.gG()[j];
    Field a = gj;
    for (std::size_t l = 0; l < a.size(); ++l) a[l] += px.w()[j][l];
    ComponentLimits r;
    r.probe = v_pair(op, a, gj);
    Field q = gj;
    for (std::size_t l = 0; l < q.size(); ++l) q[l] += px.H()[j][l];
    Field b = q;
    for (std::size_t l = 0; l < b.size(); ++l) b[l] += px.wstar()[j][l];
    r.cim = v_pair(op, b, q);
    // <(Lambda_V - Lambda_0) t, t>: the V = 0 extension of t is -H^j, the V one is grad G + w1
    BField t = trace(g, gj);
    double tt = pairing_of_solution(g, px.w1()[j], t) + pairing_of_solution(g, px.H()[j], t);
    r.ssm = 0.5 * (r.probe + r.cim - tt);
    return r;
}

Certificate lower_bound_certificate(const IndicatorSequence& s, int level, int sign, double C, double Cpp) {
    if (!(C > 0)) throw Error(E_ARG, "the jump constant must be positive");
    if (sign != 1 && sign != -1) throw Error(E_ARG, "jump sign must be +1 or -1");
    if (s.method == SeqMethod::Ssm) throw Error(E_ARG, "the certificate applies to the probe and cim sequences");
    if (level < 0 || level >= int(s.levels.size())) throw Error(E_ARG, "no such level");
    const auto& L = s.levels[level];
    Certificate c;
    c.lhs = sign * L.value;
    c.rhs = C * L.l2 * L.l2 - Cpp * L.l2 * L.l1;
    c.holds = c.lhs >= c.rhs;
    return c;
}

const char* trend_name(Trend t) {
    switch (t) {
        case Trend::Diverges: return "diverges";
        case Trend::Converges: return "converges";
        case Trend::Bounded: return "bounded";
        case Trend::Undecided: return "undecided";
    }
    return "?";
}

SeriesJudgement judge_series(const std::vector<double>& v, const std::vector<bool>& usable, const DecisionRule& r) {
    SeriesJudgement j;
    std::size_t n = 0;
    while (n < v.size() && (usable.empty() || usable[n]) && std::isfinite(v[n])) ++n;
    j.used = int(n);
    if (n < std::size_t(std::max(r.min_levels, 2))) return j;
    double first = v.front(), last = v[n - 1];
    j.sign = last > 0 ? 1 : (last < 0 ? -1 : 0);
    j.growth = std::abs(first) > 0 ? std::abs(last) / std::abs(first) : INFINITY;
    std::size_t t0 = n >= 3 ? n - 3 : 0;
    double lo = v[t0], hi = lo, mag = 0, peak = 0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(v[i]));
    for (std::size_t i = t0; i < n; ++i) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
        mag = std::max(mag, std::abs(v[i]));
    }
    j.spread = mag > 0 ? (hi - lo) / mag : 0.0;

    // monotone tail of the signed magnitude over the last (up to) three increments
    bool tail = j.sign != 0;
    std::size_t k0 = n > 3 ? n - 3 : 1;
    for (std::size_t i = k0; i < n && tail; ++i)
        if (!(j.sign * v[i] > j.sign * v[i - 1]) || !(j.sign * v[i - 1] > 0)) tail = false;
    if (tail && j.growth >= r.growth_factor) j.trend = Trend::Diverges;
    else if (j.spread <= r.spread_tol) j.trend = Trend::Converges;
    else if (peak <= r.bound_factor * std::abs(first)) j.trend = Trend::Bounded;
    return j;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::InsideDbar: return "inside_Dbar";
        case Verdict::Outside: return "outside";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::vector<Needle> spread_needles(const GridSpec& g, const Vec3& x, int count, double angle_deg) {
    if (count < 1) throw Error(E_ARG, "need at least one needle");
    for (int a = 0; a < 3; ++a)
        if (!(x[a] > 0 && x[a] < g.ext[a])) throw Error(E_ARG, "point outside the box");
    int fa = 0, side = 0;
    double best = 1e300;
    for (int a = 0; a < 3; ++a)
        for (int s = 0; s < 2; ++s) {
            double d = s ? g.ext[a] - x[a] : x[a];
            if (d < best) best = d, fa = a, side = s;
        }
    int t1 = (fa + 1) % 3, t2 = (fa + 2) % 3;
    double hmax = std::max({g.h[0], g.h[1], g.h[2]});
    double reach = best * std::tan(angle_deg * kPi / 180.0);
    std::vector<Needle> out;
    for (int k = 0; k < count; ++k) {
        Vec3 e = x;
        e[fa] = side ? g.ext[fa] : 0.0;
        if (k > 0) {
            double az = 2 * kPi * (k - 1) / std::max(count - 1, 1);
            e[t1] += reach * std::cos(az);
            e[t2] += reach * std::sin(az);
        }
        for (int a : {t1, t2}) e[a] = std::clamp(e[a], 2 * hmax, g.ext[a] - 2 * hmax);
        out.push_back(make_needle(g.ext, e, {}, x));
    }
    return out;
}

MembershipVerdict decide(const Vec3& x, const std::vector<Needle>& needles, const std::vector<const SequenceSet*>& sets,
                         SeqMethod m, int j, const DecisionRule& r) {
    if (needles.size() != sets.size()) throw Error(E_ARG, "one sequence set per needle");
    MembershipVerdict v;
    v.x = x;
    v.method = m;
    v.j = j;
    bool all_div = !needles.empty(), some_conv = false;
    for (std::size_t i = 0; i < needles.size(); ++i) {
        NeedleEvidence e;
        e.needle = needles[i];
        const auto& s = sets[i]->get(m);
        e.values = s.values();
        e.judgement = judge_series(e.values, s.usable(), r);
        if (e.judgement.trend != Trend::Diverges) all_div = false;
        if (e.judgement.trend == Trend::Converges || e.judgement.trend == Trend::Bounded) some_conv = true;
        v.evidence.push_back(std::move(e));
    }
    // a convergent or bounded series on one needle is a certificate for the outside; divergence needs all of them
    if (some_conv) v.verdict = Verdict::Outside;
    else if (all_div) v.verdict = Verdict::InsideDbar;
    return v;
}

MembershipVerdict classify_point(const SchrodingerOperator& op, const Vec3& x, const std::vector<Needle>& needles,
                                 SeqMethod m, int j, const Mask& inD, const NeedleParams& p, const DecisionRule& r) {
    std::vector<SequenceSet> sets;
    for (const auto& s : needles) {
        auto seq = generate_needle_sequence(op, s, j, p);
        sets.push_back(indicator_sequences(op, seq, inD));
    }
    std::vector<const SequenceSet*> ptr;
    for (const auto& s : sets) ptr.push_back(&s);
    return decide(x, needles, ptr, m, j, r);
}

}  // namespace ips
