#include "kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <map>
#include <mutex>
#include <queue>

namespace ips {

static double checked_r(const Vec3& z) {
    double r = norm(z);
    if (!(r >= 1e-14)) throw Error(E_ARG, "kernel evaluated at |z| < 1e-14");
    return r;
}

double G(const Vec3& z) { return 1.0 / (4 * kPi * checked_r(z)); }

Vec3 gradG(const Vec3& z) {
    double r = checked_r(z);
    double c = -1.0 / (4 * kPi * r * r * r);
    return {c * z[0], c * z[1], c * z[2]};
}

double dG(const Vec3& z, int j) {
    double r = checked_r(z);
    return -z[j] / (4 * kPi * r * r * r);
}

Mat3 hessG(const Vec3& z) {
    double r = checked_r(z), r2 = r * r;
    double c = 1.0 / (4 * kPi * r2 * r2 * r);
    Mat3 H{};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) H[i][j] = H[j][i] = c * (3 * z[i] * z[j] - (i == j ? r2 : 0.0));
    return H;
}

Vec3 hessG_col(const Vec3& z, int a) {
    double r = checked_r(z), r2 = r * r;
    double c = 1.0 / (4 * kPi * r2 * r2 * r);
    Vec3 v;
    for (int i = 0; i < 3; ++i) v[i] = c * (3 * z[i] * z[a] - (i == a ? r2 : 0.0));
    return v;
}

template <int N>
static GaussRule make_rule() {
    using Q = boost::math::quadrature::gauss<double, N>;
    GaussRule g;
    auto xs = Q::abscissa();
    auto ws = Q::weights();
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] == 0.0) {
            g.x.push_back(0.0);
            g.w.push_back(ws[i]);
        } else {
            g.x.push_back(-xs[i]);
            g.w.push_back(ws[i]);
            g.x.push_back(xs[i]);
            g.w.push_back(ws[i]);
        }
    }
    // sort for reproducible summation order
    std::vector<std::size_t> p(g.x.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
    std::sort(p.begin(), p.end(), [&](auto a, auto b) { return g.x[a] < g.x[b]; });
    GaussRule s;
    for (auto i : p) {
        s.x.push_back(g.x[i]);
        s.w.push_back(g.w[i]);
    }
    return s;
}

const GaussRule& gauss_rule(int n) {
    static const GaussRule r4 = make_rule<4>(), r8 = make_rule<8>(), r12 = make_rule<12>(),
                           r16 = make_rule<16>(), r20 = make_rule<20>(), r30 = make_rule<30>();
    switch (n) {
        case 4: return r4;
        case 8: return r8;
        case 12: return r12;
        case 16: return r16;
        case 20: return r20;
        case 30: return r30;
    }
    throw Error(E_ARG, "unsupported Gauss rule size");
}

double sphere_energy_closed_form(double eps, double R) { return (1.0 / eps - 1.0 / R) / (12 * kPi); }

double cone_energy_integral(const Vec3& a_in, double theta, const Vec3& b_in, double eps, double R) {
    if (!(theta > 0 && theta <= kPi)) throw Error(E_ARG, "cone half-angle must lie in (0, pi]");
    if (!(eps > 0 && eps < R)) throw Error(E_ARG, "need 0 < eps < R");
    double na = norm(a_in), nb = norm(b_in);
    if (na == 0 || nb == 0) throw Error(E_ARG, "zero direction");
    Vec3 a{a_in[0] / na, a_in[1] / na, a_in[2] / na}, b{b_in[0] / nb, b_in[1] / nb, b_in[2] / nb};
    // orthonormal frame (a, e1, e2)
    Vec3 t = std::abs(a[0]) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    double ta = dot(t, a);
    Vec3 e1{t[0] - ta * a[0], t[1] - ta * a[1], t[2] - ta * a[2]};
    double n1 = norm(e1);
    for (auto& c : e1) c /= n1;
    Vec3 e2{a[1] * e1[2] - a[2] * e1[1], a[2] * e1[0] - a[0] * e1[2], a[0] * e1[1] - a[1] * e1[0]};

    // radial factor int_eps^R r^2 r^-4 /(16 pi^2) dr, done in s = log r
    auto radial = [&](double s) { return std::exp(-s); };
    double rad = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(radial, std::log(eps), std::log(R),
                                                                                15, 1e-13) /
                 (16 * kPi * kPi);

    const auto& gq = gauss_rule(30);
    double ang = 0;
    for (std::size_t it = 0; it < gq.x.size(); ++it) {
        double th = 0.5 * theta * (gq.x[it] + 1), wth = 0.5 * theta * gq.w[it];
        double st = std::sin(th), ct = std::cos(th);
        double row = 0;
        for (std::size_t ip = 0; ip < gq.x.size(); ++ip) {
            double ph = kPi * (gq.x[ip] + 1), wph = kPi * gq.w[ip];
            Vec3 w;
            for (int c = 0; c < 3; ++c) w[c] = ct * a[c] + st * (std::cos(ph) * e1[c] + std::sin(ph) * e2[c]);
            double wb = dot(w, b);
            row += wph * wb * wb;
        }
        ang += wth * st * row;
    }
    return rad * ang;
}

namespace {
struct Panel {
    int face;
    double u0, u1, v0, v1;
    double q, qc, err;
};
struct ByErr {
    bool operator()(const Panel& a, const Panel& b) const { return a.err < b.err; }
};
}  // namespace

QuadResult face_integral(const Vec3& ext, const std::function<double(const Vec3&, int)>& f, double rtol,
                         int max_panels) {
    const auto& gq = gauss_rule(8);
    auto eval = [&](int face, double u0, double u1, double v0, double v1) {
        int a = face / 2, b = (a + 1) % 3, d = (a + 2) % 3;
        double s = 0;
        for (std::size_t i = 0; i < gq.x.size(); ++i) {
            double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gq.x[i];
            double row = 0;
            for (std::size_t j = 0; j < gq.x.size(); ++j) {
                double v = 0.5 * (v0 + v1) + 0.5 * (v1 - v0) * gq.x[j];
                Vec3 p;
                p[a] = (face % 2) ? ext[a] : 0.0;
                p[b] = u;
                p[d] = v;
                row += gq.w[j] * f(p, face);
            }
            s += gq.w[i] * row;
        }
        return s * 0.25 * (u1 - u0) * (v1 - v0);
    };
    auto make = [&](int face, double u0, double u1, double v0, double v1) {
        Panel p{face, u0, u1, v0, v1, 0, 0, 0};
        p.q = eval(face, u0, u1, v0, v1);
        double um = 0.5 * (u0 + u1), vm = 0.5 * (v0 + v1);
        p.qc = eval(face, u0, um, v0, vm) + eval(face, um, u1, v0, vm) + eval(face, u0, um, vm, v1) +
               eval(face, um, u1, vm, v1);
        p.err = std::abs(p.q - p.qc);
        return p;
    };
    std::priority_queue<Panel, std::vector<Panel>, ByErr> pq;
    for (int face = 0; face < 6; ++face) {
        int a = face / 2, b = (a + 1) % 3, d = (a + 2) % 3;
        for (int iu = 0; iu < 2; ++iu)
            for (int iv = 0; iv < 2; ++iv)
                pq.push(make(face, iu * ext[b] / 2, (iu + 1) * ext[b] / 2, iv * ext[d] / 2, (iv + 1) * ext[d] / 2));
    }
    auto totals = [&]() {
        // deterministic: copy and sum in a fixed order
        auto c = pq;
        std::vector<Panel> v;
        while (!c.empty()) {
            v.push_back(c.top());
            c.pop();
        }
        std::sort(v.begin(), v.end(), [](const Panel& x, const Panel& y) {
            return std::tie(x.face, x.u0, x.v0, x.u1) < std::tie(y.face, y.u0, y.v0, y.u1);
        });
        double s = 0, e = 0;
        for (auto& p : v) {
            s += p.qc;
            e += p.err;
        }
        return std::pair{s, e};
    };
    QuadResult r;
    auto [s, e] = totals();
    int count = int(pq.size());
    // running sums drift a little; the final value is re-summed in a fixed order
    while (e > rtol * std::abs(s) && count < max_panels) {
        Panel p = pq.top();
        pq.pop();
        s -= p.qc;
        e -= p.err;
        double um = 0.5 * (p.u0 + p.u1), vm = 0.5 * (p.v0 + p.v1);
        Panel c[4] = {make(p.face, p.u0, um, p.v0, vm), make(p.face, um, p.u1, p.v0, vm),
                      make(p.face, p.u0, um, vm, p.v1), make(p.face, um, p.u1, vm, p.v1)};
        for (auto& q : c) {
            s += q.qc;
            e += q.err;
            pq.push(q);
        }
        count += 3;
    }
    auto [sf, ef] = totals();
    r.value = sf;
    r.err = ef;
    r.panels = count;
    r.ok = ef <= rtol * std::abs(sf) || ef == 0;
    return r;
}

static double hess_contract(const Vec3& zx, const Vec3& zy) {
    Mat3 A = hessG(zx), B = hessG(zy);
    double s = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += A[i][j] * B[i][j];
    return s;
}

QuadResult exterior_hess_energy(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol) {
    // z = x + (p - x)/t, p on the box surface, t in (0,1]; dz = t^-4 nu.(p-x) dt dS
    auto f = [&](const Vec3& p, int face) {
        int a = face / 2;
        double nu_px = (face % 2) ? (p[a] - x[a]) : (x[a] - p[a]);
        Vec3 d = sub(p, x);
        auto g = [&](double t) {
            Vec3 z{x[0] + d[0] / t, x[1] + d[1] / t, x[2] + d[2] / t};
            double t2 = t * t;
            return hess_contract(sub(z, x), sub(z, y)) / (t2 * t2);
        };
        double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(g, 0.0, 1.0, 10, 1e-10);
        return nu_px * v;
    };
    return face_integral(ext, f, rtol);
}

QuadResult exterior_hess_energy_surface(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol) {
    auto f = [&](const Vec3& p, int face) {
        int a = face / 2;
        double sgn = (face % 2) ? 1.0 : -1.0;
        Vec3 gx = gradG(sub(p, x));
        Vec3 hy = hessG_col(sub(p, y), a);
        return -sgn * dot(gx, hy);
    };
    return face_integral(ext, f, rtol);
}

QuadResult boundary_grad_norm(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol) {
    auto f = [&](const Vec3& p, int) { return dot(gradG(sub(p, x)), gradG(sub(p, y))); };
    return face_integral(ext, f, rtol);
}

}  // namespace ips
