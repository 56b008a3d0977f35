#pragma once
#include <string>
#include <vector>

#include "grid.hpp"
#include "potential.hpp"
#include "solver.hpp"

namespace ips {

// polyline from a boundary point to a tip inside the box
struct Needle {
    std::vector<Vec3> v;
    const Vec3& tip() const { return v.back(); }
    const Vec3& entry() const { return v.front(); }
    double length() const;
    double distance(const Vec3& p) const;
    Vec3 at(double t) const;  // arclength parameter in [0,1]
};

Needle make_needle(const Vec3& ext, const Vec3& boundary_point, const std::vector<Vec3>& waypoints, const Vec3& tip);
bool needle_hits(const Needle& s, const ObstacleSpec& ob);
// the face the needle enters through
int needle_face(const Vec3& ext, const Needle& s);

struct NeedleParams {
    double delta0 = 0.24;        // tube radius at the first level
    double ratio = 0.8408964152537145;  // delta shrink per level, 2^(-1/4)
    int levels = 5;
    double tau0 = 0.02;          // discrepancy target at delta0, shrinks like sqrt(delta)
    double min_delta_h = 3.5;    // levels below this many cells are flagged
    double far_dist = 0.25;      // collocation is thinned beyond this distance from the needle
    int far_stride = 2;
    double patch_factor = 2.0;   // patch radius in units of max(delta0, length)
};

struct NeedleLevel {
    int n = 0;
    double delta = 0;
    double tau = 0;
    double residual = 0;       // relative weighted residual of the fit
    double mu_rel = 0;         // chosen Tikhonov parameter over the top singular value squared
    bool discrepancy_ok = true;
    bool resolved = true;      // delta >= min_delta_h * h
    double shell_h1_err = 0;   // H1 error against d_j G on the first-level exterior of the tube
    BField f;                  // trace of v_n
    Field v;                   // discrete-harmonic v_n
};

struct NeedleSequence {
    Needle needle;
    int j = 0;  // 0-based component
    Vec3 x{};
    int patch_nodes = 0;
    int rows = 0;
    BField target;  // trace of d_j G(.-x)
    std::vector<NeedleLevel> levels;
};

// one sequence per requested component; the least-squares factorization is shared
std::vector<NeedleSequence> generate_needle_sequences(const SchrodingerOperator& op, const Needle& s,
                                                      const std::vector<int>& js, const NeedleParams& p = {});
NeedleSequence generate_needle_sequence(const SchrodingerOperator& op, const Needle& s, int j,
                                        const NeedleParams& p = {});

// d_j G(.-x) - v_n on the lattice
Field make_Gnj(const GridSpec& g, const NeedleSequence& seq, int level);
// v_n + H^j per level
std::vector<Field> modified_sequence(const NeedleSequence& seq, const Field& Hj);

struct NormRow {
    int n = 0;
    double delta = 0, l2 = 0, l1 = 0, ratio = 0;
};
std::vector<NormRow> needle_norm_series(const GridSpec& g, const NeedleSequence& seq, const Mask& U);

// factor >= 4 from first to last value and the last three increments positive
bool grows(const std::vector<double>& series, double factor = 4.0);

std::string needle_csv(const GridSpec& g, const NeedleSequence& seq, const std::vector<std::pair<std::string, Mask>>& regions);

}  // namespace ips
