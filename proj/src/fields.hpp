#pragma once
#include <memory>
#include <optional>

#include "grid.hpp"
#include "potential.hpp"
#include "solver.hpp"

namespace ips {

// move x to the nearest cell center; lattice sums of dipole kernels are then symmetric about x
Vec3 snap_probe(const GridSpec& g, const Vec3& x);

VField sample_gradG(const GridSpec& g, const Vec3& x);
Field sample_G(const GridSpec& g, const Vec3& x);

struct SolveLog {
    int solves = 0;
    int iters = 0;
    double max_rel_res = 0;
    void add(const SolveStats& s) {
        ++solves;
        iters += s.iters;
        if (s.rel_res > max_rel_res) max_rel_res = s.rel_res;
    }
};

// zero-trace reflected field: (-Lap+V) w = -V grad G(.-x)
VField solve_w(const SchrodingerOperator& op, const VField& gG, SolveLog* log = nullptr);
// V-harmonic with trace grad G(.-x)
VField solve_w1(const SchrodingerOperator& op, const VField& gG, SolveLog* log = nullptr);
// both at once: right side -V grad G, trace grad G
VField solve_W(const SchrodingerOperator& op, const VField& gG, SolveLog* log = nullptr);
// harmonic with trace -grad G(.-x)
VField solve_H(const SchrodingerOperator& op, const VField& gG, SolveLog* log = nullptr);
// zero trace, right side -V (grad G + H)
VField solve_wstar(const SchrodingerOperator& op, const VField& gG, const VField& H, SolveLog* log = nullptr);
// scalar analogue with G itself
Field solve_w_scalar(const SchrodingerOperator& op, const Field& Gx, SolveLog* log = nullptr);

// all the fields attached to one probe point, solved on first use
class ProbeFields {
public:
    ProbeFields(const SchrodingerOperator& op, const Vec3& x);
    const Vec3& x() const { return x_; }
    const GridSpec& grid() const { return op_.grid(); }
    const VField& gG() const { return gG_; }
    const VField& w();
    const VField& w1();
    const VField& W();
    const VField& H();
    const VField& wstar();
    const SolveLog& log() const { return log_; }

private:
    const SchrodingerOperator& op_;
    Vec3 x_;
    VField gG_;
    std::optional<VField> w_, w1_, W_, H_, ws_;
    SolveLog log_;
};

}  // namespace ips
