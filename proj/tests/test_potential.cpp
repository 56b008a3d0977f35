#include <cmath>

#include "doctest.h"
#include "kernel.hpp"
#include "potential.hpp"
#include "solver.hpp"

using namespace ips;

static Shape ball(Vec3 c, double r, int sign, double amp) {
    Shape s;
    s.kind = Shape::Ball;
    s.c = c;
    s.r = r;
    s.sign = sign;
    s.amp = amp;
    return s;
}

TEST_CASE("nodal sampling of a ball") {
    auto g = build_grid(15);
    ObstacleSpec ob{{ball({0.5, 0.5, 0.5}, 0.2, +1, 5)}};
    auto p = sample_potential(g, ob);
    for (std::size_t l = 0; l < g.lattice; ++l) {
        bool in = norm(sub(g.pos(std::int64_t(l)), {0.5, 0.5, 0.5})) < 0.2;
        CHECK(p.V[l] == (in ? 5.0 : 0.0));
    }
    CHECK(p.C == 5.0);
    auto e = sample_potential(g, ObstacleSpec{});
    for (double v : e.V) CHECK(v == 0.0);
}

TEST_CASE("signed shapes and validation") {
    auto g = build_grid(15);
    ObstacleSpec ob{{ball({0.3, 0.5, 0.5}, 0.15, +1, 5), ball({0.7, 0.5, 0.5}, 0.15, -1, 5)}};
    auto p = sample_potential(g, ob);
    for (auto l : g.interior) {
        auto x = g.pos(l);
        if (norm(sub(x, {0.3, 0.5, 0.5})) < 0.15) CHECK(p.V[l] == 5.0);
        else if (norm(sub(x, {0.7, 0.5, 0.5})) < 0.15) CHECK(p.V[l] == -5.0);
        else CHECK(p.V[l] == 0.0);
    }
    ObstacleSpec touch{{ball({0.1, 0.5, 0.5}, 0.1, +1, 1)}};
    CHECK_THROWS_AS(sample_potential(g, touch), Error);
    ObstacleSpec overlap{{ball({0.4, 0.5, 0.5}, 0.15, +1, 1), ball({0.6, 0.5, 0.5}, 0.15, -1, 1)}};
    CHECK_THROWS_AS(sample_potential(g, overlap), Error);
    Shape b;
    b.kind = Shape::Box;
    b.c = {0.2, 0.2, 0.2};
    b.hi = {0.4, 0.5, 0.6};
    b.amp = 2;
    b.sign = -1;
    auto pb = sample_potential(g, ObstacleSpec{{b}});
    CHECK(pb.V[g.idx(5, 5, 5)] == -2.0);
    CHECK(pb.V[g.idx(10, 5, 5)] == 0.0);
}

TEST_CASE("bump profile keeps the floor in the collar") {
    auto g = build_grid(23);
    Shape s = ball({0.5, 0.5, 0.5}, 0.3, +1, 3);
    s.bump = 2;
    s.collar = 0.08;
    auto p = sample_potential(g, ObstacleSpec{{s}});
    double mx = 0;
    for (auto l : g.interior) {
        double d = s.sdf(g.pos(l));
        if (d < 0) {
            CHECK(p.V[l] >= 3.0);
            if (d > -0.08) CHECK(p.V[l] == 3.0);
            mx = std::max(mx, p.V[l]);
        }
    }
    CHECK(mx > 4.0);
}

TEST_CASE("signed distance") {
    ObstacleSpec ob{{ball({0.5, 0.5, 0.5}, 0.2, +1, 1)}};
    CHECK(distance_to_obstacle_boundary(ob, {0.8, 0.5, 0.5}) == doctest::Approx(0.1));
    CHECK(distance_to_obstacle_boundary(ob, {0.5, 0.5, 0.5}) == doctest::Approx(-0.2));
    ObstacleSpec two{{ball({0.3, 0.5, 0.5}, 0.1, +1, 1), ball({0.7, 0.5, 0.5}, 0.1, +1, 1)}};
    CHECK(distance_to_obstacle_boundary(two, {0.5, 0.5, 0.5}) == doctest::Approx(0.1));
    CHECK(distance_to_obstacle_boundary(two, {0.75, 0.5, 0.5}) == doctest::Approx(-0.05));
}

TEST_CASE("smallest eigenvalue of the Dirichlet operator") {
    auto g = build_grid(15);
    SchrodingerOperator op0(g, zeros(g));
    auto w0 = check_wellposed(op0);
    CHECK(w0.converged);
    CHECK(w0.lambda_min == doctest::Approx(discrete_lambda_min(g)).epsilon(1e-8));
    CHECK(w0.lambda_min == doctest::Approx(3 * kPi * kPi).epsilon(0.01));
    CHECK_FALSE(w0.near_singular);

    Field five = zeros(g);
    for (auto l : g.interior) five[l] = 5;
    auto w5 = check_wellposed(SchrodingerOperator(g, five));
    CHECK(w5.lambda_min - w0.lambda_min >= -1e-9);
    CHECK(w5.lambda_min - w0.lambda_min <= 5 + 1e-9);

    auto ball_p = sample_potential(g, ObstacleSpec{{ball({0.5, 0.5, 0.5}, 0.25, +1, 5)}});
    auto wb = check_wellposed(SchrodingerOperator(g, ball_p.V));
    CHECK(wb.converged);
    CHECK(wb.lambda_min > w0.lambda_min);
    CHECK(wb.lambda_min < w0.lambda_min + 5);

    Field shift = zeros(g);
    for (auto l : g.interior) shift[l] = -discrete_lambda_min(g) + 1e-4;
    auto p = potential_from_field(g, shift);
    auto ws = check_wellposed(SchrodingerOperator(g, p.V));
    CHECK(ws.converged);
    CHECK(ws.near_singular);
    CHECK(ws.lambda_min == doctest::Approx(1e-4).epsilon(1e-3));
}
