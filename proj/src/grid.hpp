#pragma once
#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace ips {

using Vec3 = std::array<double, 3>;
using Field = std::vector<double>;          // one value per lattice node
using VField = std::array<Field, 3>;
using BField = std::vector<double>;         // one value per boundary node
using Mask = std::vector<std::uint8_t>;

struct Error : std::runtime_error {
    int code;
    Error(int c, const std::string& m) : std::runtime_error(m), code(c) {}
};

enum ErrCode { E_OK = 0, E_ARG = 1, E_CONFIG = 2, E_WELLPOSED = 3, E_NUMERIC = 4, E_IO = 5 };

// faces: 0 -x, 1 +x, 2 -y, 3 +y, 4 -z, 5 +z
struct GridSpec {
    Vec3 ext{};
    std::array<int, 3> n{};
    Vec3 h{};
    std::array<int, 3> N{};  // n+2
    std::size_t lattice = 0;
    std::vector<std::int64_t> interior;   // lattice indices, row-major (i,j,k) order
    std::vector<std::int64_t> boundary;
    std::vector<std::int64_t> bslot;      // lattice -> boundary slot, -1 inside
    std::vector<std::int64_t> islot;      // lattice -> interior slot, -1 on boundary
    std::vector<std::uint8_t> bface;      // assigned outward face per boundary slot

    std::int64_t idx(int i, int j, int k) const { return (std::int64_t(i) * N[1] + j) * N[2] + k; }
    void ijk(std::int64_t l, int& i, int& j, int& k) const {
        k = int(l % N[2]);
        l /= N[2];
        j = int(l % N[1]);
        i = int(l / N[1]);
    }
    Vec3 pos(int i, int j, int k) const { return {i * h[0], j * h[1], k * h[2]}; }
    Vec3 pos(std::int64_t l) const {
        int i, j, k;
        ijk(l, i, j, k);
        return pos(i, j, k);
    }
    double cell() const { return h[0] * h[1] * h[2]; }
    std::size_t n_interior() const { return interior.size(); }
    std::size_t n_boundary() const { return boundary.size(); }
    bool inside_open(const Vec3& x) const {
        for (int a = 0; a < 3; ++a)
            if (!(x[a] > 0.0 && x[a] < ext[a])) return false;
        return true;
    }
    double dist_to_boundary(const Vec3& x) const;
};

GridSpec build_grid(const Vec3& ext, const std::array<int, 3>& n);
inline GridSpec build_grid(int n) { return build_grid({1, 1, 1}, {n, n, n}); }

Field zeros(const GridSpec& g);
Field sample(const GridSpec& g, auto&& f) {
    Field u(g.lattice);
    for (std::size_t l = 0; l < g.lattice; ++l) u[l] = f(g.pos(std::int64_t(l)));
    return u;
}

BField trace(const GridSpec& g, const Field& u);
void set_trace(const GridSpec& g, Field& u, const BField& b);

// 7-point Laplacian at interior nodes (boundary entries left 0)
Field discrete_laplacian(const GridSpec& g, const Field& u);
// centered inside, 3-point one-sided on the boundary planes
VField discrete_gradient(const GridSpec& g, const Field& u);
// one-sided 3-point derivative along the assigned outward normal
BField normal_derivative(const GridSpec& g, const Field& u);

// trapezoid weights
double volume_weight(const GridSpec& g, std::int64_t l);
double integrate_volume(const GridSpec& g, const Field& u, const Mask* mask = nullptr);
std::vector<double> surface_weights(const GridSpec& g);
double integrate_surface(const GridSpec& g, const BField& b);
// sum over faces of the face trapezoid rule applied to (d_nu u) * b, each face using its own
// normal at edge and corner nodes
double surface_normal_pairing(const GridSpec& g, const Field& u, const BField& b);

// discrete energy a_h(u,v) = sum over lattice edges of weighted difference products
// + sum over interior nodes of h^3 V u v. Its gradient in u_i is h^3 (A u)_i.
double energy_form(const GridSpec& g, const Field& u, const Field& v, const Field* V = nullptr);

// trilinear interpolation, x inside the closed box
double interp(const GridSpec& g, const Field& u, const Vec3& x);
// centered differences of the interpolant with spacing s
double divergence_at(const GridSpec& g, const VField& w, const Vec3& x, double s);

}  // namespace ips
