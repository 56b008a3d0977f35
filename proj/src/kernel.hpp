#pragma once
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "grid.hpp"

namespace ips {

using Mat3 = std::array<std::array<double, 3>, 3>;

inline constexpr double kPi = 3.14159265358979323846;

double G(const Vec3& z);
Vec3 gradG(const Vec3& z);
double dG(const Vec3& z, int j);
Mat3 hessG(const Vec3& z);
// d/dnu of grad G: column of the Hessian along the face normal
Vec3 hessG_col(const Vec3& z, int axis);

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

// nodes and weights on [-1,1]
struct GaussRule {
    std::vector<double> x, w;
};
const GaussRule& gauss_rule(int n);  // n in {4, 8, 12, 16, 20, 30}

// integral of |grad G . b|^2 over {eps <= |z| <= R, angle(z,a) <= theta}; theta = pi is the full ball shell
double cone_energy_integral(const Vec3& a, double theta, const Vec3& b, double eps, double R);
double sphere_energy_closed_form(double eps, double R);

struct QuadResult {
    double value = 0;
    double err = 0;
    bool ok = true;
    int panels = 0;
};

// f(p, face) integrated over the six faces of [0,ext]; adaptive tensor Gauss panels
QuadResult face_integral(const Vec3& ext, const std::function<double(const Vec3&, int)>& f, double rtol,
                         int max_panels = 20000);

// int over R^3 minus the box of Hess G(z-x) : Hess G(z-y)
QuadResult exterior_hess_energy(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol = 1e-4);
// same quantity by Green's theorem: -int_{dOmega} grad G(z-x) . d_nu grad G(z-y)
QuadResult exterior_hess_energy_surface(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol = 1e-6);
// int_{dOmega} grad G(z-x) . grad G(z-y)
QuadResult boundary_grad_norm(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol = 1e-6);
inline QuadResult boundary_grad_norm(const Vec3& ext, const Vec3& x) { return boundary_grad_norm(ext, x, x); }

}  // namespace ips
