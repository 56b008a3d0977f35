#include "needle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "kernel.hpp"

namespace ips {

static Vec3 lerp(const Vec3& a, const Vec3& b, double t) {
    return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])};
}

static double seg_dist(const Vec3& p, const Vec3& a, const Vec3& b) {
    Vec3 ab = sub(b, a);
    double L2 = dot(ab, ab);
    double t = L2 > 0 ? std::clamp(dot(sub(p, a), ab) / L2, 0.0, 1.0) : 0.0;
    return norm(sub(p, lerp(a, b, t)));
}

// closest distance between two segments, sampled parameterization refined by clamping
static double seg_seg_dist(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    Vec3 d1 = sub(p1, p0), d2 = sub(q1, q0), r = sub(p0, q0);
    double a = dot(d1, d1), e = dot(d2, d2), f = dot(d2, r);
    double s = 0, t = 0;
    double c = dot(d1, r), b = dot(d1, d2), den = a * e - b * b;
    if (den > 1e-300 * a * e) s = std::clamp((b * f - c * e) / den, 0.0, 1.0);
    t = (b * s + f) / e;
    if (t < 0) {
        t = 0;
        s = std::clamp(-c / a, 0.0, 1.0);
    } else if (t > 1) {
        t = 1;
        s = std::clamp((b - c) / a, 0.0, 1.0);
    }
    return norm(sub(lerp(p0, p1, s), lerp(q0, q1, t)));
}

double Needle::length() const {
    double L = 0;
    for (std::size_t i = 1; i < v.size(); ++i) L += norm(sub(v[i], v[i - 1]));
    return L;
}

double Needle::distance(const Vec3& p) const {
    double d = 1e300;
    for (std::size_t i = 1; i < v.size(); ++i) d = std::min(d, seg_dist(p, v[i - 1], v[i]));
    return d;
}

Vec3 Needle::at(double t) const {
    double L = length() * std::clamp(t, 0.0, 1.0);
    for (std::size_t i = 1; i < v.size(); ++i) {
        double l = norm(sub(v[i], v[i - 1]));
        if (L <= l || i + 1 == v.size()) return lerp(v[i - 1], v[i], l > 0 ? std::min(L / l, 1.0) : 0.0);
        L -= l;
    }
    return v.back();
}

static int face_of(const Vec3& ext, const Vec3& p, double tol) {
    int face = -1, hits = 0;
    for (int a = 0; a < 3; ++a) {
        if (std::abs(p[a]) <= tol) face = 2 * a, ++hits;
        if (std::abs(p[a] - ext[a]) <= tol) face = 2 * a + 1, ++hits;
    }
    return hits == 1 ? face : (hits == 0 ? -1 : -2);
}

Needle make_needle(const Vec3& ext, const Vec3& boundary_point, const std::vector<Vec3>& waypoints, const Vec3& tip) {
    Needle s;
    s.v.push_back(boundary_point);
    for (const auto& w : waypoints) s.v.push_back(w);
    s.v.push_back(tip);
    double tol = 1e-9 * std::max({ext[0], ext[1], ext[2]});
    for (int a = 0; a < 3; ++a)
        if (boundary_point[a] < -tol || boundary_point[a] > ext[a] + tol)
            throw Error(E_ARG, "needle entry point outside the box");
    int f = face_of(ext, boundary_point, tol);
    if (f == -1) throw Error(E_ARG, "needle entry point is not on the boundary");
    if (f == -2) throw Error(E_ARG, "needle entry point lies on an edge of the box");
    for (std::size_t i = 1; i < s.v.size(); ++i) {
        for (int a = 0; a < 3; ++a)
            if (!(s.v[i][a] > tol && s.v[i][a] < ext[a] - tol)) {
                throw Error(E_ARG, i + 1 == s.v.size() ? "needle tip not strictly inside the box"
                                                       : "needle vertex not strictly inside the box");
            }
        if (norm(sub(s.v[i], s.v[i - 1])) <= tol) throw Error(E_ARG, "degenerate needle segment");
    }
    std::size_t m = s.v.size() - 1;  // segment count
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = i + 1; k < m; ++k) {
            if (k == i + 1) {
                // adjacent segments share a vertex; they overlap only if they fold back
                Vec3 a = sub(s.v[i], s.v[i + 1]), b = sub(s.v[k + 1], s.v[k]);
                if (dot(a, b) > 0 && norm({a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
                                           a[0] * b[1] - a[1] * b[0]}) <= 1e-12 * norm(a) * norm(b))
                    throw Error(E_ARG, "needle folds back on itself");
                continue;
            }
            if (seg_seg_dist(s.v[i], s.v[i + 1], s.v[k], s.v[k + 1]) <= tol)
                throw Error(E_ARG, "needle intersects itself");
        }
    return s;
}

int needle_face(const Vec3& ext, const Needle& s) {
    return face_of(ext, s.entry(), 1e-9 * std::max({ext[0], ext[1], ext[2]}));
}

static bool seg_hits_box(const Vec3& p, const Vec3& q, const Vec3& lo, const Vec3& hi) {
    double t0 = 0, t1 = 1;
    for (int a = 0; a < 3; ++a) {
        double d = q[a] - p[a];
        if (std::abs(d) < 1e-300) {
            if (p[a] < lo[a] || p[a] > hi[a]) return false;
            continue;
        }
        double ta = (lo[a] - p[a]) / d, tb = (hi[a] - p[a]) / d;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    return true;
}

bool needle_hits(const Needle& s, const ObstacleSpec& ob) {
    for (const auto& sh : ob.shapes)
        for (std::size_t i = 1; i < s.v.size(); ++i) {
            if (sh.kind == Shape::Ball) {
                if (seg_dist(sh.c, s.v[i - 1], s.v[i]) <= sh.r) return true;
            } else if (seg_hits_box(s.v[i - 1], s.v[i], sh.c, sh.hi)) {
                return true;
            }
        }
    return false;
}

bool grows(const std::vector<double>& s, double factor) {
    if (s.size() < 4) return false;
    if (!(s.front() > 0) || s.back() < factor * s.front()) return false;
    for (std::size_t i = s.size() - 3; i < s.size(); ++i)
        if (!(s[i] > s[i - 1])) return false;
    return true;
}

// derivative along x_j of a trilinear point source at x; solving -Lap u = this gives the
// zero-trace discrete field with the singularity of d_j G(.-x)
static Field dipole_rhs(const GridSpec& g, const Vec3& x, int j) {
    Field r = zeros(g);
    int c[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        double f = x[a] / g.h[a];
        c[a] = std::clamp(int(std::floor(f)), 0, g.N[a] - 2);
        t[a] = f - c[a];
    }
    for (int da = 0; da < 2; ++da)
        for (int db = 0; db < 2; ++db)
            for (int dc = 0; dc < 2; ++dc) {
                int d[3] = {da, db, dc};
                double w = 1;
                for (int a = 0; a < 3; ++a) {
                    if (a == j) w *= (d[a] ? 1.0 : -1.0) / g.h[a];
                    else w *= d[a] ? t[a] : 1 - t[a];
                }
                auto l = g.idx(c[0] + da, c[1] + db, c[2] + dc);
                if (g.islot[l] >= 0) r[l] -= w / g.cell();
            }
    return r;
}

std::vector<NeedleSequence> generate_needle_sequences(const SchrodingerOperator& op, const Needle& s,
                                                      const std::vector<int>& js, const NeedleParams& p) {
    const GridSpec& g = op.grid();
    const Vec3 x = s.tip();
    int face = needle_face(g.ext, s);
    if (face < 0) throw Error(E_ARG, "needle entry point is not on a face");
    if (p.levels < 1 || !(p.delta0 > 0) || !(p.ratio > 0 && p.ratio < 1)) throw Error(E_CONFIG, "bad needle levels");
    for (int j : js)
        if (j < 0 || j > 2) throw Error(E_ARG, "component must be 0, 1 or 2");
    const double hmax = std::max({g.h[0], g.h[1], g.h[2]});
    const std::size_t nb = g.n_boundary();
    BField zb(nb, 0.0);

    // patch of boundary nodes on the entry face around the entry point, edges excluded
    int fa = face / 2;
    double rad = std::max({p.patch_factor * p.delta0, p.patch_factor * s.length(), 2.5 * hmax});
    std::vector<std::size_t> patch;
    for (std::size_t b = 0; b < nb; ++b) {
        if (g.bface[b] != face) continue;
        int c[3];
        g.ijk(g.boundary[b], c[0], c[1], c[2]);
        bool edge = false;
        for (int a = 0; a < 3; ++a)
            if (a != fa && (c[a] == 0 || c[a] == g.N[a] - 1)) edge = true;
        if (edge) continue;
        if (norm(sub(g.pos(g.boundary[b]), s.entry())) <= rad) patch.push_back(b);
    }
    if (patch.empty()) throw Error(E_NUMERIC, "empty boundary patch");

    // distances to the needle and to the tip
    std::vector<double> ds(g.lattice, 0.0);
    for (auto l : g.interior) ds[l] = s.distance(g.pos(l));

    // columns: harmonic extensions of patch node deltas, kept only where they can be collocated
    const double dmin = p.delta0 * std::pow(p.ratio, p.levels - 1);
    std::vector<std::int64_t> rows;
    std::vector<double> thin;
    for (auto l : g.interior) {
        if (ds[l] < dmin) continue;
        double t = 1;
        if (ds[l] > p.far_dist && p.far_stride > 1) {
            int c[3];
            g.ijk(l, c[0], c[1], c[2]);
            if (c[0] % p.far_stride || c[1] % p.far_stride || c[2] % p.far_stride) continue;
            t = std::pow(double(p.far_stride), 1.5);
        }
        rows.push_back(l);
        thin.push_back(t);
    }
    const Eigen::Index m = Eigen::Index(rows.size()), k = Eigen::Index(patch.size());
    Eigen::MatrixXd C(m, k);
    for (Eigen::Index c = 0; c < k; ++c) {
        BField e = zb;
        e[patch[c]] = 1;
        Field u = op.solve_laplace(e);
        for (Eigen::Index r = 0; r < m; ++r) C(r, c) = u[rows[r]];
    }

    std::vector<NeedleSequence> out;
    std::vector<Field> Dx, T;
    for (int j : js) {
        NeedleSequence q;
        q.needle = s;
        q.j = j;
        q.x = x;
        q.patch_nodes = int(k);
        q.rows = int(m);
        Field gj = sample(g, [&](const Vec3& z) { return dG(sub(z, x), j); });
        q.target = trace(g, gj);
        auto rhs = dipole_rhs(g, x, j);
        Dx.push_back(op.solve_laplace(zb, &rhs));
        out.push_back(std::move(q));
    }

    // compact set where the H1 error is monitored: outside the first-level tube, away from the box
    Mask shell(g.lattice, 0);
    for (auto l : g.interior)
        if (ds[l] >= p.delta0 && g.dist_to_boundary(g.pos(l)) >= 0.5 * p.delta0) shell[l] = 1;

    // regularization never increases from one level to the next
    std::vector<double> prev_rel(js.size(), 1.0);
    for (int lev = 0; lev < p.levels; ++lev) {
        double delta = p.delta0 * std::pow(p.ratio, lev);
        double tau = p.tau0 * std::sqrt(delta / p.delta0);
        std::vector<Eigen::Index> sel;
        std::vector<double> wt;
        for (Eigen::Index r = 0; r < m; ++r) {
            double d = ds[rows[r]];
            if (d < delta) continue;
            double rr = norm(sub(g.pos(rows[r]), x));
            double a = 4 * kPi * rr * rr;
            double q = d / (d + 2 * delta);
            sel.push_back(r);
            wt.push_back(thin[r] * a / (1 + a) * q * q * q * q);
        }
        const Eigen::Index ms = Eigen::Index(sel.size());
        if (ms < k) throw Error(E_NUMERIC, "fewer collocation rows than patch nodes");
        Eigen::MatrixXd A(ms, k);
        Eigen::MatrixXd B(ms, Eigen::Index(js.size()));
        for (Eigen::Index r = 0; r < ms; ++r) {
            A.row(r) = C.row(sel[r]) * wt[r];
            for (std::size_t c = 0; c < js.size(); ++c) B(r, Eigen::Index(c)) = -Dx[c][rows[sel[r]]] * wt[r];
        }
        Eigen::HouseholderQR<Eigen::Ref<Eigen::MatrixXd>> qr(A);
        Eigen::MatrixXd QtB = qr.householderQ().transpose() * B;
        Eigen::MatrixXd R = A.topLeftCorner(k, k).triangularView<Eigen::Upper>();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        for (std::size_t c = 0; c < js.size(); ++c) {
            auto& q = out[c];
            Eigen::VectorXd bt = svd.matrixU().transpose() * QtB.col(Eigen::Index(c)).head(k);
            double bn2 = B.col(Eigen::Index(c)).squaredNorm();
            double perp = std::max(bn2 - bt.squaredNorm(), 0.0);
            auto res = [&](double mu) {
                double s2 = perp;
                for (Eigen::Index i = 0; i < k; ++i) {
                    double f = mu / (sv[i] * sv[i] + mu) * bt[i];
                    s2 += f * f;
                }
                return bn2 > 0 ? std::sqrt(s2 / bn2) : 0.0;
            };
            // largest mu on a log grid whose residual meets the target
            const int ngrid = 150;
            double s0 = sv[0] * sv[0];
            auto mu_at = [&](int i) { return s0 * std::pow(10.0, -1.0 - 27.0 * i / (ngrid - 1)); };
            double rmin = res(mu_at(ngrid - 1));
            double tgt = std::max(tau, 1.05 * rmin);
            double mu = mu_at(ngrid - 1);
            for (int i = 0; i < ngrid; ++i)
                if (res(mu_at(i)) <= tgt) {
                    mu = mu_at(i);
                    break;
                }
            mu = std::min(mu, prev_rel[c] * s0);
            prev_rel[c] = mu / s0;
            Eigen::VectorXd coef(k);
            for (Eigen::Index i = 0; i < k; ++i) coef[i] = sv[i] * bt[i] / (sv[i] * sv[i] + mu);
            Eigen::VectorXd gvec = svd.matrixV() * coef;

            NeedleLevel L;
            L.n = lev + 1;
            L.delta = delta;
            L.tau = tau;
            L.residual = res(mu);
            L.mu_rel = mu / s0;
            L.discrepancy_ok = rmin <= tau;
            L.resolved = delta >= p.min_delta_h * hmax;
            L.f = q.target;
            for (Eigen::Index i = 0; i < k; ++i) L.f[patch[i]] -= gvec[i];
            L.v = op.solve_laplace(L.f);
            // H1 error on the shell against sampled d_j G
            Field e = L.v;
            double l2 = 0;
            for (auto l : g.interior) {
                e[l] -= dG(sub(g.pos(l), x), q.j);
            }
            for (auto l : g.boundary) e[l] -= dG(sub(g.pos(l), x), q.j);
            VField ge = discrete_gradient(g, e);
            for (auto l : g.interior)
                if (shell[l]) l2 += e[l] * e[l] + ge[0][l] * ge[0][l] + ge[1][l] * ge[1][l] + ge[2][l] * ge[2][l];
            L.shell_h1_err = std::sqrt(l2 * g.cell());
            q.levels.push_back(std::move(L));
        }
    }
    return out;
}

NeedleSequence generate_needle_sequence(const SchrodingerOperator& op, const Needle& s, int j, const NeedleParams& p) {
    return std::move(generate_needle_sequences(op, s, {j}, p).front());
}

Field make_Gnj(const GridSpec& g, const NeedleSequence& seq, int level) {
    if (level < 0 || level >= int(seq.levels.size())) throw Error(E_ARG, "no such level");
    Field r = sample(g, [&](const Vec3& z) { return dG(sub(z, seq.x), seq.j); });
    const auto& v = seq.levels[level].v;
    for (std::size_t l = 0; l < r.size(); ++l) r[l] -= v[l];
    return r;
}

std::vector<Field> modified_sequence(const NeedleSequence& seq, const Field& Hj) {
    std::vector<Field> r;
    for (const auto& L : seq.levels) {
        Field u = L.v;
        for (std::size_t l = 0; l < u.size(); ++l) u[l] += Hj[l];
        r.push_back(std::move(u));
    }
    return r;
}

std::vector<NormRow> needle_norm_series(const GridSpec& g, const NeedleSequence& seq, const Mask& U) {
    std::vector<NormRow> out;
    for (const auto& L : seq.levels) {
        NormRow r;
        r.n = L.n;
        r.delta = L.delta;
        Field a(g.lattice), b(g.lattice);
        for (std::size_t l = 0; l < g.lattice; ++l) {
            a[l] = L.v[l] * L.v[l];
            b[l] = std::abs(L.v[l]);
        }
        r.l2 = std::sqrt(integrate_volume(g, a, &U));
        r.l1 = integrate_volume(g, b, &U);
        r.ratio = r.l2 > 0 ? r.l1 / r.l2 : 0.0;
        out.push_back(r);
    }
    return out;
}

std::string needle_csv(const GridSpec& g, const NeedleSequence& seq,
                       const std::vector<std::pair<std::string, Mask>>& regions) {
    std::ostringstream os;
    os.precision(10);
    os << "level,delta,resolved,discrepancy_ok,residual,mu_rel,shell_h1_err";
    for (const auto& [name, m] : regions) os << ',' << name << "_l2," << name << "_l1," << name << "_ratio";
    os << '\n';
    std::vector<std::vector<NormRow>> norms;
    for (const auto& [name, m] : regions) norms.push_back(needle_norm_series(g, seq, m));
    for (std::size_t i = 0; i < seq.levels.size(); ++i) {
        const auto& L = seq.levels[i];
        os << L.n << ',' << L.delta << ',' << int(L.resolved) << ',' << int(L.discrepancy_ok) << ',' << L.residual
           << ',' << L.mu_rel << ',' << L.shell_h1_err;
        for (const auto& nr : norms) os << ',' << nr[i].l2 << ',' << nr[i].l1 << ',' << nr[i].ratio;
        os << '\n';
    }
    return os.str();
}

}  // namespace ips
