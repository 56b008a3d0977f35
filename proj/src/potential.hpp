#pragma once
#include <string>
#include <vector>

#include "grid.hpp"

namespace ips {

struct Shape {
    enum Kind { Ball, Box } kind = Ball;
    Vec3 c{};         // ball center, or box low corner
    double r = 0;     // ball radius
    Vec3 hi{};        // box high corner
    int sign = +1;
    double amp = 1;   // constant part of |V|
    double bump = 0;  // extra smooth interior variation, vanishes on a collar
    double collar = 0;

    double sdf(const Vec3& x) const;  // negative inside
};

struct ObstacleSpec {
    std::vector<Shape> shapes;
};

struct PotentialSpec {
    ObstacleSpec obstacle;
    Field V;
    double C = 0;   // jump floor
    Mask inD;       // nodes with nonzero potential support
};

void validate_obstacle(const Vec3& ext, const ObstacleSpec& ob);
PotentialSpec sample_potential(const GridSpec& g, const ObstacleSpec& ob);
// raw nodal values, e.g. a constant shift over the whole box
PotentialSpec potential_from_field(const GridSpec& g, Field V);
double distance_to_obstacle_boundary(const ObstacleSpec& ob, const Vec3& x);
double potential_at(const ObstacleSpec& ob, const Vec3& x);

}  // namespace ips
