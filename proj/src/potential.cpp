#include "potential.hpp"

#include <algorithm>
#include <cmath>

#include "kernel.hpp"

namespace ips {

double Shape::sdf(const Vec3& x) const {
    if (kind == Ball) return norm(sub(x, c)) - r;
    double out = 0, in = -1e300;
    for (int a = 0; a < 3; ++a) {
        double d = std::max(c[a] - x[a], x[a] - hi[a]);
        in = std::max(in, d);
        if (d > 0) out += d * d;
    }
    return in > 0 ? std::sqrt(out) : in;
}

static double shape_value(const Shape& s, const Vec3& x) {
    double d = -s.sdf(x);  // depth below the surface
    double v = s.amp;
    if (s.bump != 0) {
        double depth_max = s.kind == Shape::Ball ? s.r : 0.5 * std::min({s.hi[0] - s.c[0], s.hi[1] - s.c[1], s.hi[2] - s.c[2]});
        double span = depth_max - s.collar;
        if (span > 0 && d > s.collar) {
            double t = (d - s.collar) / span;
            v += s.bump * std::sin(0.5 * kPi * std::min(t, 1.0)) * std::sin(0.5 * kPi * std::min(t, 1.0));
        }
    }
    return s.sign * v;
}

void validate_obstacle(const Vec3& ext, const ObstacleSpec& ob) {
    for (const auto& s : ob.shapes) {
        if (s.sign != 1 && s.sign != -1) throw Error(E_CONFIG, "shape sign must be +1 or -1");
        if (!(s.amp > 0)) throw Error(E_CONFIG, "shape amplitude must be positive");
        if (s.kind == Shape::Ball) {
            if (!(s.r > 0)) throw Error(E_CONFIG, "ball radius must be positive");
            for (int a = 0; a < 3; ++a)
                if (!(s.c[a] - s.r > 0 && s.c[a] + s.r < ext[a])) throw Error(E_CONFIG, "shape touches the box boundary");
        } else {
            for (int a = 0; a < 3; ++a) {
                if (!(s.hi[a] > s.c[a])) throw Error(E_CONFIG, "box corners out of order");
                if (!(s.c[a] > 0 && s.hi[a] < ext[a])) throw Error(E_CONFIG, "shape touches the box boundary");
            }
        }
    }
    for (std::size_t i = 0; i < ob.shapes.size(); ++i)
        for (std::size_t j = i + 1; j < ob.shapes.size(); ++j) {
            const auto &a = ob.shapes[i], &b = ob.shapes[j];
            if (a.sign == b.sign) continue;
            bool apart;
            if (a.kind == Shape::Ball && b.kind == Shape::Ball)
                apart = norm(sub(a.c, b.c)) > a.r + b.r;
            else if (a.kind == Shape::Box && b.kind == Shape::Box) {
                apart = false;
                for (int k = 0; k < 3; ++k) apart = apart || a.hi[k] < b.c[k] || b.hi[k] < a.c[k];
            } else {
                const Shape& bx = a.kind == Shape::Box ? a : b;
                const Shape& bl = a.kind == Shape::Box ? b : a;
                apart = bx.sdf(bl.c) > bl.r;
            }
            if (!apart) throw Error(E_CONFIG, "opposite-sign shapes must be disjoint");
        }
}

double potential_at(const ObstacleSpec& ob, const Vec3& x) {
    for (const auto& s : ob.shapes)
        if (s.sdf(x) < 0) return shape_value(s, x);
    return 0.0;
}

PotentialSpec sample_potential(const GridSpec& g, const ObstacleSpec& ob) {
    validate_obstacle(g.ext, ob);
    PotentialSpec p;
    p.obstacle = ob;
    p.V = zeros(g);
    p.inD.assign(g.lattice, 0);
    for (auto l : g.interior) {
        double v = potential_at(ob, g.pos(l));
        if (v != 0) {
            p.V[l] = v;
            p.inD[l] = 1;
        }
    }
    double C = 1e300;
    for (const auto& s : ob.shapes) C = std::min(C, s.amp);
    p.C = ob.shapes.empty() ? 0.0 : C;
    return p;
}

PotentialSpec potential_from_field(const GridSpec& g, Field V) {
    if (V.size() != g.lattice) throw Error(E_ARG, "potential field size mismatch");
    PotentialSpec p;
    p.inD.assign(g.lattice, 0);
    double C = 1e300;
    for (auto l : g.boundary) V[l] = 0;
    for (auto l : g.interior) {
        if (!std::isfinite(V[l])) throw Error(E_ARG, "potential not finite");
        if (V[l] != 0) {
            p.inD[l] = 1;
            C = std::min(C, std::abs(V[l]));
        }
    }
    p.C = C == 1e300 ? 0.0 : C;
    p.V = std::move(V);
    return p;
}

double distance_to_obstacle_boundary(const ObstacleSpec& ob, const Vec3& x) {
    if (ob.shapes.empty()) return 1e300;
    double d = 1e300;
    for (const auto& s : ob.shapes) d = std::min(d, s.sdf(x));
    return d;
}

}  // namespace ips
