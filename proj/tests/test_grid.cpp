#include <cmath>
#include <random>

#include "doctest.h"
#include "grid.hpp"
#include "kernel.hpp"
#include <boost/math/quadrature/gauss_kronrod.hpp>

using namespace ips;

TEST_CASE("lattice counts and spacing") {
    auto g = build_grid({1, 1, 1}, {3, 3, 3});
    CHECK(g.n_interior() == 27);
    CHECK(g.n_boundary() == 98);
    CHECK(g.h[0] == doctest::Approx(0.25));
    CHECK_THROWS_AS(build_grid({1, 1, 1}, {0, 3, 3}), Error);
    CHECK_THROWS_AS(build_grid({1, -1, 1}, {3, 3, 3}), Error);
    // disjoint cover of the lattice
    std::vector<int> seen(g.lattice, 0);
    for (auto l : g.interior) seen[l]++;
    for (auto l : g.boundary) seen[l]++;
    for (auto s : seen) CHECK(s == 1);
}

TEST_CASE("edge nodes take the x face first") {
    auto g = build_grid(5);
    auto s = g.bslot[g.idx(0, 0, 0)];
    CHECK(g.bface[s] == 0);
    s = g.bslot[g.idx(3, 6, 6)];
    CHECK(g.bface[s] == 3);
}

TEST_CASE("laplacian on polynomials") {
    auto g = build_grid(6);
    auto c = sample(g, [](const Vec3&) { return 3.0; });
    auto lin = sample(g, [](const Vec3& p) { return p[0] - 2 * p[1] + 0.5 * p[2]; });
    auto q = sample(g, [](const Vec3& p) { return p[0] * p[0]; });
    auto lc = discrete_laplacian(g, c), ll = discrete_laplacian(g, lin), lq = discrete_laplacian(g, q);
    for (auto l : g.interior) {
        CHECK(std::abs(lc[l]) < 1e-10);
        CHECK(std::abs(ll[l]) < 1e-9);
        CHECK(lq[l] == doctest::Approx(2.0).epsilon(1e-10));
    }
}

TEST_CASE("gradient stencils") {
    auto g = build_grid(5);
    auto z1 = sample(g, [](const Vec3& p) { return p[0]; });
    auto gr = discrete_gradient(g, z1);
    for (std::size_t l = 0; l < g.lattice; ++l) {
        CHECK(gr[0][l] == doctest::Approx(1.0));
        CHECK(std::abs(gr[1][l]) < 1e-12);
        CHECK(std::abs(gr[2][l]) < 1e-12);
    }
    auto zero = zeros(g);
    auto g0 = discrete_gradient(g, zero);
    for (int a = 0; a < 3; ++a)
        for (double v : g0[a]) CHECK(v == 0.0);
    auto b = sample(g, [](const Vec3& p) { return p[0] * p[1]; });
    auto gb = discrete_gradient(g, b);
    for (auto l : g.interior) {
        auto p = g.pos(l);
        CHECK(gb[0][l] == doctest::Approx(p[1]).epsilon(1e-12));
        CHECK(gb[1][l] == doctest::Approx(p[0]).epsilon(1e-12));
        CHECK(std::abs(gb[2][l]) < 1e-12);
    }
}

TEST_CASE("normal derivative of affine and constant fields") {
    auto g = build_grid(4);
    auto z1 = sample(g, [](const Vec3& p) { return p[0]; });
    auto dn = normal_derivative(g, z1);
    for (std::size_t s = 0; s < dn.size(); ++s) {
        double want = g.bface[s] == 1 ? 1.0 : (g.bface[s] == 0 ? -1.0 : 0.0);
        CHECK(dn[s] == doctest::Approx(want).epsilon(1e-12));
    }
    auto c = sample(g, [](const Vec3&) { return 2.5; });
    for (double v : normal_derivative(g, c)) CHECK(std::abs(v) < 1e-11);
}

TEST_CASE("normal derivative of an exterior point source is second order") {
    Vec3 x{1.8, 0.3, 0.6};
    auto err = [&](int n) {
        auto g = build_grid(n);
        auto u = sample(g, [&](const Vec3& p) { return G(sub(p, x)); });
        auto dn = normal_derivative(g, u);
        double e = 0;
        for (std::size_t s = 0; s < dn.size(); ++s) {
            int f = g.bface[s], a = f / 2;
            double want = (f % 2 ? 1.0 : -1.0) * gradG(sub(g.pos(g.boundary[s]), x))[a];
            e = std::max(e, std::abs(dn[s] - want));
        }
        return e;
    };
    double e1 = err(31), e2 = err(63);
    CHECK(std::log2(e1 / e2) > 1.8);
}

TEST_CASE("quadrature of constants") {
    auto g = build_grid(7);
    auto one = sample(g, [](const Vec3&) { return 1.0; });
    CHECK(integrate_volume(g, one) == doctest::Approx(1.0).epsilon(1e-12));
    BField b(g.n_boundary(), 1.0);
    CHECK(integrate_surface(g, b) == doctest::Approx(6.0).epsilon(1e-12));
    auto g2 = build_grid({2, 1, 0.5}, {5, 6, 7});
    auto one2 = sample(g2, [](const Vec3&) { return 1.0; });
    CHECK(integrate_volume(g2, one2) == doctest::Approx(1.0).epsilon(1e-12));
    BField b2(g2.n_boundary(), 1.0);
    CHECK(integrate_surface(g2, b2) == doctest::Approx(2 * (2 + 1 + 0.5)).epsilon(1e-12));
}

TEST_CASE("volume quadrature converges at second order") {
    auto f = [](const Vec3& p) { return std::exp(p[0] + p[1] * p[1]) * std::cos(p[2]); };
    // exact: (e-1) * int_0^1 e^{y^2} dy * sin 1
    double iy = boost::math::quadrature::gauss_kronrod<double, 31>::integrate([](double y) { return std::exp(y * y); },
                                                                                0.0, 1.0, 10, 1e-14);
    double exact = (std::exp(1.0) - 1) * iy * std::sin(1.0);
    std::vector<double> hs, es;
    for (int n : {7, 15, 31}) {
        auto g = build_grid(n);
        auto u = sample(g, f);
        hs.push_back(g.h[0]);
        es.push_back(std::abs(integrate_volume(g, u) - exact));
    }
    double slope = std::log(es[0] / es[2]) / std::log(hs[0] / hs[2]);
    CHECK(slope > 1.8);
    CHECK(slope < 2.2);
}

TEST_CASE("gradient energy of a point source over a ball matches spherical quadrature") {
    Vec3 c{0.5, 0.5, 0.5}, x{0.93, 0.52, 0.48};
    double r0 = 0.2;
    // oracle: spherical coordinates about the ball center
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double oracle = GK::integrate(
        [&](double r) {
            return GK::integrate(
                [&](double th) {
                    return GK::integrate(
                        [&](double ph) {
                            Vec3 z{c[0] + r * std::sin(th) * std::cos(ph), c[1] + r * std::sin(th) * std::sin(ph),
                                   c[2] + r * std::cos(th)};
                            auto gg = gradG(sub(z, x));
                            return dot(gg, gg) * r * r * std::sin(th);
                        },
                        0.0, 2 * kPi, 5, 1e-10);
                },
                0.0, kPi, 5, 1e-10);
        },
        0.0, r0, 5, 1e-10);
    auto g = build_grid(63);
    auto u = sample(g, [&](const Vec3& p) {
        auto gg = gradG(sub(p, x));
        return dot(gg, gg);
    });
    Mask m(g.lattice, 0);
    for (std::size_t l = 0; l < g.lattice; ++l) m[l] = norm(sub(g.pos(std::int64_t(l)), c)) < r0;
    CHECK(integrate_volume(g, u, &m) == doctest::Approx(oracle).epsilon(0.01));
}

TEST_CASE("discrete laplacian is symmetric on fields vanishing at the boundary") {
    auto g = build_grid({1, 1.3, 0.8}, {6, 7, 5});
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-1, 1);
    Field u = zeros(g), v = zeros(g);
    for (auto l : g.interior) {
        u[l] = U(rng);
        v[l] = U(rng);
    }
    auto lu = discrete_laplacian(g, u), lv = discrete_laplacian(g, v);
    Field a(g.lattice), b(g.lattice);
    for (std::size_t l = 0; l < g.lattice; ++l) {
        a[l] = lu[l] * v[l];
        b[l] = u[l] * lv[l];
    }
    double s1 = integrate_volume(g, a), s2 = integrate_volume(g, b);
    CHECK(std::abs(s1 - s2) <= 1e-12 * std::abs(s1));
}

TEST_CASE("energy form: gradient identity and affine energy") {
    auto g = build_grid({1, 1.2, 0.9}, {5, 6, 4});
    auto z1 = sample(g, [](const Vec3& p) { return p[0]; });
    CHECK(energy_form(g, z1, z1) == doctest::Approx(1.0 * 1.2 * 0.9).epsilon(1e-12));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1, 1);
    Field u(g.lattice), V = zeros(g);
    for (auto& c : u) c = U(rng);
    for (auto l : g.interior) V[l] = U(rng);
    auto lap = discrete_laplacian(g, u);
    for (int t = 0; t < 10; ++t) {
        auto l = g.interior[std::size_t(t * 7) % g.n_interior()];
        Field e = zeros(g);
        e[l] = 1;
        double want = g.cell() * (-lap[l] + V[l] * u[l]);
        CHECK(energy_form(g, u, e, &V) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("interpolated divergence of a quadratic field") {
    auto g = build_grid(9);
    VField w{sample(g, [](const Vec3& p) { return p[0] * p[1]; }), sample(g, [](const Vec3& p) { return p[1] * p[2]; }),
             sample(g, [](const Vec3& p) { return p[2]; })};
    Vec3 x{0.41, 0.37, 0.53};
    // trilinear interpolation is exact for multilinear fields
    CHECK(divergence_at(g, w, x, g.h[0]) == doctest::Approx(x[1] + x[2] + 1).epsilon(1e-12));
}
