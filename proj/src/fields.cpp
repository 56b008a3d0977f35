#include "fields.hpp"

#include <algorithm>
#include <cmath>

#include "kernel.hpp"

namespace ips {

Vec3 snap_probe(const GridSpec& g, const Vec3& x) {
    Vec3 y;
    for (int a = 0; a < 3; ++a) {
        double c = std::floor(x[a] / g.h[a]);
        c = std::clamp(c, 0.0, double(g.N[a] - 2));
        y[a] = (c + 0.5) * g.h[a];
    }
    return y;
}

VField sample_gradG(const GridSpec& g, const Vec3& x) {
    VField r{zeros(g), zeros(g), zeros(g)};
    for (std::size_t l = 0; l < g.lattice; ++l) {
        auto d = gradG(sub(g.pos(std::int64_t(l)), x));
        for (int a = 0; a < 3; ++a) r[a][l] = d[a];
    }
    return r;
}

Field sample_G(const GridSpec& g, const Vec3& x) {
    return sample(g, [&](const Vec3& p) { return G(sub(p, x)); });
}

static Field minus_V_times(const SchrodingerOperator& op, const Field& f) {
    Field r = zeros(op.grid());
    const auto& V = op.V();
    for (auto l : op.grid().interior) r[l] = -V[l] * f[l];
    return r;
}

static Field run(const SchrodingerOperator& op, const BField& gb, const Field* rhs, SolveLog* log) {
    SolveStats st;
    Field u = op.solve(gb, rhs, &st);
    if (log) log->add(st);
    return u;
}

VField solve_w(const SchrodingerOperator& op, const VField& gG, SolveLog* log) {
    BField zero(op.grid().n_boundary(), 0.0);
    VField r;
    for (int j = 0; j < 3; ++j) {
        auto rhs = minus_V_times(op, gG[j]);
        r[j] = run(op, zero, &rhs, log);
    }
    return r;
}

VField solve_w1(const SchrodingerOperator& op, const VField& gG, SolveLog* log) {
    VField r;
    for (int j = 0; j < 3; ++j) r[j] = run(op, trace(op.grid(), gG[j]), nullptr, log);
    return r;
}

VField solve_W(const SchrodingerOperator& op, const VField& gG, SolveLog* log) {
    VField r;
    for (int j = 0; j < 3; ++j) {
        auto rhs = minus_V_times(op, gG[j]);
        r[j] = run(op, trace(op.grid(), gG[j]), &rhs, log);
    }
    return r;
}

VField solve_H(const SchrodingerOperator& op, const VField& gG, SolveLog* log) {
    VField r;
    for (int j = 0; j < 3; ++j) {
        auto b = trace(op.grid(), gG[j]);
        for (auto& v : b) v = -v;
        SolveStats st;
        r[j] = op.solve_laplace(b, nullptr, &st);
        if (log) log->add(st);
    }
    return r;
}

VField solve_wstar(const SchrodingerOperator& op, const VField& gG, const VField& H, SolveLog* log) {
    BField zero(op.grid().n_boundary(), 0.0);
    VField r;
    for (int j = 0; j < 3; ++j) {
        Field q = gG[j];
        for (std::size_t l = 0; l < q.size(); ++l) q[l] += H[j][l];
        auto rhs = minus_V_times(op, q);
        r[j] = run(op, zero, &rhs, log);
    }
    return r;
}

Field solve_w_scalar(const SchrodingerOperator& op, const Field& Gx, SolveLog* log) {
    BField zero(op.grid().n_boundary(), 0.0);
    auto rhs = minus_V_times(op, Gx);
    return run(op, zero, &rhs, log);
}

ProbeFields::ProbeFields(const SchrodingerOperator& op, const Vec3& x) : op_(op), x_(x) {
    if (!op.grid().inside_open(x)) throw Error(E_ARG, "probe point outside the box");
    gG_ = sample_gradG(op.grid(), x);
}

const VField& ProbeFields::w() {
    if (!w_) w_ = solve_w(op_, gG_, &log_);
    return *w_;
}
const VField& ProbeFields::w1() {
    if (!w1_) w1_ = solve_w1(op_, gG_, &log_);
    return *w1_;
}
const VField& ProbeFields::W() {
    if (!W_) W_ = solve_W(op_, gG_, &log_);
    return *W_;
}
const VField& ProbeFields::H() {
    if (!H_) H_ = solve_H(op_, gG_, &log_);
    return *H_;
}
const VField& ProbeFields::wstar() {
    if (!ws_) ws_ = solve_wstar(op_, gG_, H(), &log_);
    return *ws_;
}

}  // namespace ips
