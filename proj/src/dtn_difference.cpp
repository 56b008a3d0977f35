#include "dtn_difference.hpp"

#include <cmath>
#include <random>

#include "kernel.hpp"

namespace ips {

double bdot(const BField& a, const BField& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

BField dtn_difference(const SchrodingerOperator& op, const BField& f, const Field& harmonic, SolveLog* log) {
    const auto& g = op.grid();
    SolveStats st;
    Field u = op.solve(f, nullptr, &st);
    if (log) log->add(st);
    BField a = boundary_flux(g, u), b = boundary_flux(g, harmonic);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

BField dtn_difference(const SchrodingerOperator& op, const BField& f, SolveLog* log) {
    SolveStats st;
    Field v = op.solve_laplace(f, nullptr, &st);
    if (log) log->add(st);
    return dtn_difference(op, f, v, log);
}

static double vdot(const SchrodingerOperator& op, const Field& a, const Field& b) {
    const auto& g = op.grid();
    const auto& V = op.V();
    double s = 0;
    for (auto l : g.interior)
        if (V[l] != 0) s += V[l] * a[l] * b[l];
    return s * g.cell();
}

DifferenceForms difference_forms(const SchrodingerOperator& op, const BField& f) {
    const auto& g = op.grid();
    Field v = op.solve_laplace(f);
    Field u = op.solve(f, nullptr);
    DifferenceForms r;
    BField a = boundary_flux(g, u), b = boundary_flux(g, v);
    for (std::size_t i = 0; i < a.size(); ++i) r.pairing += (a[i] - b[i]) * f[i];
    Field e = u;
    for (std::size_t l = 0; l < e.size(); ++l) e[l] -= v[l];
    double vv = vdot(op, v, v);
    r.alessandrini = vdot(op, e, v) + vv;
    r.energy = -energy_form(g, e, e, &op.V()) + vv;
    return r;
}

double l2_norm(const GridSpec& g, const Field& u, const Mask& m) {
    double s = 0;
    for (std::size_t l = 0; l < u.size(); ++l)
        if (m[l]) s += u[l] * u[l];
    return std::sqrt(s * g.cell());
}

double l1_norm(const GridSpec& g, const Field& u, const Mask& m) {
    double s = 0;
    for (std::size_t l = 0; l < u.size(); ++l)
        if (m[l]) s += std::abs(u[l]);
    return s * g.cell();
}

L1Control measure_l1_control(const SchrodingerOperator& op, const Mask& inD, int samples, std::uint64_t seed) {
    const auto& g = op.grid();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    L1Control r;
    double sum = 0;
    for (int k = 0; k < samples; ++k) {
        // a few exterior point sources plus an affine part
        Vec3 s[3];
        double c[3];
        for (int i = 0; i < 3; ++i) {
            int ax = int(U(rng) * 3) % 3;
            for (int a = 0; a < 3; ++a) s[i][a] = g.ext[a] * U(rng);
            double off = 0.1 + 0.5 * U(rng);
            s[i][ax] = U(rng) < 0.5 ? -off : g.ext[ax] + off;
            c[i] = 2 * U(rng) - 1;
        }
        double lin[4];
        for (double& q : lin) q = 2 * U(rng) - 1;
        auto f = [&](const Vec3& z) {
            double v = lin[0] + lin[1] * z[0] + lin[2] * z[1] + lin[3] * z[2];
            for (int i = 0; i < 3; ++i) v += c[i] * G(sub(z, s[i]));
            return v;
        };
        BField tb(g.boundary.size());
        for (std::size_t b = 0; b < tb.size(); ++b) tb[b] = f(g.pos(g.boundary[b]));
        Field v = op.solve_laplace(tb);
        Field u = op.solve(tb, nullptr);
        for (std::size_t l = 0; l < u.size(); ++l) u[l] -= v[l];
        double n1 = l1_norm(g, v, inD);
        double q = n1 > 0 ? l2_norm(g, u, inD) / n1 : 0.0;
        r.ratios.push_back(q);
        r.max_ratio = std::max(r.max_ratio, q);
        sum += q;
    }
    r.mean_ratio = samples > 0 ? sum / samples : 0.0;
    return r;
}

}  // namespace ips
