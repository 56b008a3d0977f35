#include "grid.hpp"

#include <algorithm>
#include <cmath>

namespace ips {

GridSpec build_grid(const Vec3& ext, const std::array<int, 3>& n) {
    GridSpec g;
    for (int a = 0; a < 3; ++a) {
        if (!(ext[a] > 0.0) || !std::isfinite(ext[a])) throw Error(E_ARG, "grid extent must be positive");
        if (n[a] <= 0) throw Error(E_ARG, "grid point count must be positive");
        g.ext[a] = ext[a];
        g.n[a] = n[a];
        g.N[a] = n[a] + 2;
        g.h[a] = ext[a] / (n[a] + 1);
    }
    g.lattice = std::size_t(g.N[0]) * g.N[1] * g.N[2];
    g.bslot.assign(g.lattice, -1);
    g.islot.assign(g.lattice, -1);
    for (int i = 0; i < g.N[0]; ++i)
        for (int j = 0; j < g.N[1]; ++j)
            for (int k = 0; k < g.N[2]; ++k) {
                auto l = g.idx(i, j, k);
                int face = -1;
                if (i == 0) face = 0;
                else if (i == g.N[0] - 1) face = 1;
                else if (j == 0) face = 2;
                else if (j == g.N[1] - 1) face = 3;
                else if (k == 0) face = 4;
                else if (k == g.N[2] - 1) face = 5;
                if (face < 0) {
                    g.islot[l] = std::int64_t(g.interior.size());
                    g.interior.push_back(l);
                } else {
                    g.bslot[l] = std::int64_t(g.boundary.size());
                    g.boundary.push_back(l);
                    g.bface.push_back(std::uint8_t(face));
                }
            }
    return g;
}

double GridSpec::dist_to_boundary(const Vec3& x) const {
    double d = 1e300;
    for (int a = 0; a < 3; ++a) d = std::min({d, x[a], ext[a] - x[a]});
    return d;
}

Field zeros(const GridSpec& g) { return Field(g.lattice, 0.0); }

BField trace(const GridSpec& g, const Field& u) {
    BField b(g.n_boundary());
    for (std::size_t s = 0; s < b.size(); ++s) b[s] = u[g.boundary[s]];
    return b;
}

void set_trace(const GridSpec& g, Field& u, const BField& b) {
    if (b.size() != g.n_boundary()) throw Error(E_ARG, "boundary field size mismatch");
    for (std::size_t s = 0; s < b.size(); ++s) u[g.boundary[s]] = b[s];
}

static void check(const GridSpec& g, const Field& u) {
    if (u.size() != g.lattice) throw Error(E_ARG, "field size mismatch");
}

Field discrete_laplacian(const GridSpec& g, const Field& u) {
    check(g, u);
    Field r = zeros(g);
    const std::int64_t st[3] = {std::int64_t(g.N[1]) * g.N[2], g.N[2], 1};
    for (auto l : g.interior) {
        double s = 0;
        for (int a = 0; a < 3; ++a) s += (u[l + st[a]] - 2 * u[l] + u[l - st[a]]) / (g.h[a] * g.h[a]);
        r[l] = s;
    }
    return r;
}

VField discrete_gradient(const GridSpec& g, const Field& u) {
    check(g, u);
    VField r{zeros(g), zeros(g), zeros(g)};
    const std::int64_t st[3] = {std::int64_t(g.N[1]) * g.N[2], g.N[2], 1};
    for (int i = 0; i < g.N[0]; ++i)
        for (int j = 0; j < g.N[1]; ++j)
            for (int k = 0; k < g.N[2]; ++k) {
                auto l = g.idx(i, j, k);
                int c[3] = {i, j, k};
                for (int a = 0; a < 3; ++a) {
                    double h = g.h[a];
                    if (c[a] == 0)
                        r[a][l] = (-3 * u[l] + 4 * u[l + st[a]] - u[l + 2 * st[a]]) / (2 * h);
                    else if (c[a] == g.N[a] - 1)
                        r[a][l] = (3 * u[l] - 4 * u[l - st[a]] + u[l - 2 * st[a]]) / (2 * h);
                    else
                        r[a][l] = (u[l + st[a]] - u[l - st[a]]) / (2 * h);
                }
            }
    return r;
}

BField normal_derivative(const GridSpec& g, const Field& u) {
    check(g, u);
    const std::int64_t st[3] = {std::int64_t(g.N[1]) * g.N[2], g.N[2], 1};
    BField r(g.n_boundary());
    for (std::size_t s = 0; s < r.size(); ++s) {
        auto l = g.boundary[s];
        int f = g.bface[s], a = f / 2;
        double h = g.h[a];
        // inward step is -st for + faces
        std::int64_t in = (f % 2) ? -st[a] : st[a];
        r[s] = (3 * u[l] - 4 * u[l + in] + u[l + 2 * in]) / (2 * h);
    }
    return r;
}

static inline double tw(int i, int N) { return (i == 0 || i == N - 1) ? 0.5 : 1.0; }

double volume_weight(const GridSpec& g, std::int64_t l) {
    int i, j, k;
    g.ijk(l, i, j, k);
    return g.cell() * tw(i, g.N[0]) * tw(j, g.N[1]) * tw(k, g.N[2]);
}

double integrate_volume(const GridSpec& g, const Field& u, const Mask* mask) {
    check(g, u);
    if (mask && mask->size() != g.lattice) throw Error(E_ARG, "mask size mismatch");
    double s = 0;
    for (int i = 0; i < g.N[0]; ++i) {
        double si = 0;
        for (int j = 0; j < g.N[1]; ++j)
            for (int k = 0; k < g.N[2]; ++k) {
                auto l = g.idx(i, j, k);
                if (mask && !(*mask)[l]) continue;
                si += u[l] * tw(j, g.N[1]) * tw(k, g.N[2]);
            }
        s += si * tw(i, g.N[0]);
    }
    return s * g.cell();
}

std::vector<double> surface_weights(const GridSpec& g) {
    std::vector<double> w(g.n_boundary(), 0.0);
    for (std::size_t s = 0; s < w.size(); ++s) {
        int c[3];
        g.ijk(g.boundary[s], c[0], c[1], c[2]);
        for (int a = 0; a < 3; ++a) {
            if (c[a] != 0 && c[a] != g.N[a] - 1) continue;
            int b = (a + 1) % 3, d = (a + 2) % 3;
            w[s] += g.h[b] * g.h[d] * tw(c[b], g.N[b]) * tw(c[d], g.N[d]);
        }
    }
    return w;
}

double integrate_surface(const GridSpec& g, const BField& b) {
    if (b.size() != g.n_boundary()) throw Error(E_ARG, "boundary field size mismatch");
    auto w = surface_weights(g);
    double s = 0;
    for (std::size_t i = 0; i < b.size(); ++i) s += w[i] * b[i];
    return s;
}

double surface_normal_pairing(const GridSpec& g, const Field& u, const BField& b) {
    check(g, u);
    if (b.size() != g.n_boundary()) throw Error(E_ARG, "boundary field size mismatch");
    const std::int64_t st[3] = {std::int64_t(g.N[1]) * g.N[2], g.N[2], 1};
    double total = 0;
    for (std::size_t s = 0; s < b.size(); ++s) {
        auto l = g.boundary[s];
        int c[3];
        g.ijk(l, c[0], c[1], c[2]);
        for (int a = 0; a < 3; ++a) {
            if (c[a] != 0 && c[a] != g.N[a] - 1) continue;
            int bb = (a + 1) % 3, d = (a + 2) % 3;
            double w = g.h[bb] * g.h[d] * tw(c[bb], g.N[bb]) * tw(c[d], g.N[d]);
            std::int64_t in = c[a] == 0 ? st[a] : -st[a];
            double dn = (3 * u[l] - 4 * u[l + in] + u[l + 2 * in]) / (2 * g.h[a]);
            total += w * dn * b[s];
        }
    }
    return total;
}

double energy_form(const GridSpec& g, const Field& u, const Field& v, const Field* V) {
    check(g, u);
    check(g, v);
    const std::int64_t st[3] = {std::int64_t(g.N[1]) * g.N[2], g.N[2], 1};
    double total = 0;
    for (int a = 0; a < 3; ++a) {
        double c = g.cell() / (g.h[a] * g.h[a]);
        int b = (a + 1) % 3, d = (a + 2) % 3;
        double sa = 0;
        for (int i = 0; i < g.N[0]; ++i) {
            double si = 0;
            for (int j = 0; j < g.N[1]; ++j)
                for (int k = 0; k < g.N[2]; ++k) {
                    int cc[3] = {i, j, k};
                    if (cc[a] == g.N[a] - 1) continue;
                    auto l = g.idx(i, j, k);
                    double w = tw(cc[b], g.N[b]) * tw(cc[d], g.N[d]);
                    si += w * (u[l + st[a]] - u[l]) * (v[l + st[a]] - v[l]);
                }
            sa += si;
        }
        total += c * sa;
    }
    if (V) {
        check(g, *V);
        double s = 0;
        for (auto l : g.interior) s += (*V)[l] * u[l] * v[l];
        total += g.cell() * s;
    }
    return total;
}

double interp(const GridSpec& g, const Field& u, const Vec3& x) {
    int c[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
        double f = x[a] / g.h[a];
        int i = int(std::floor(f));
        i = std::clamp(i, 0, g.N[a] - 2);
        c[a] = i;
        t[a] = f - i;
    }
    double s = 0;
    for (int da = 0; da < 2; ++da)
        for (int db = 0; db < 2; ++db)
            for (int dc = 0; dc < 2; ++dc) {
                double w = (da ? t[0] : 1 - t[0]) * (db ? t[1] : 1 - t[1]) * (dc ? t[2] : 1 - t[2]);
                s += w * u[g.idx(c[0] + da, c[1] + db, c[2] + dc)];
            }
    return s;
}

double divergence_at(const GridSpec& g, const VField& w, const Vec3& x, double s) {
    double d = 0;
    for (int a = 0; a < 3; ++a) {
        Vec3 p = x, m = x;
        p[a] += s;
        m[a] -= s;
        d += (interp(g, w[a], p) - interp(g, w[a], m)) / (2 * s);
    }
    return d;
}

}  // namespace ips
