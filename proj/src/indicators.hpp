#pragma once
#include <string>
#include <vector>

#include "fields.hpp"
#include "kernel.hpp"
#include "needle.hpp"

namespace ips {

struct Check {
    std::string name;
    double lhs = 0, rhs = 0;
    double abs_err() const { return std::abs(lhs - rhs); }
    double rel_err() const;  // relative to max(|lhs|, |rhs|)
};

struct Indicator {
    double value = 0;
    std::string method;
    std::vector<Check> checks;
    std::vector<std::string> flags;
    const Check* check(const std::string& name) const;
};

// h^3 sum of V a.b over interior nodes
double v_pair(const SchrodingerOperator& op, const VField& a, const VField& b);
double v_pair(const SchrodingerOperator& op, const Field& a, const Field& b);
// sum_j a^V(a_j, b_j)
double energy_pair(const SchrodingerOperator& op, const VField& a, const VField& b);
// sum_j <d_nu a_j, b_j> through the weak flux of a_j
double flux_pair(const GridSpec& g, const VField& a, const VField& b);
// sum_j <(Lambda_V - Lambda_0) f_j, f_j>-type pairing of the traces of grad G(.-x) and grad G(.-y)
double dtn_difference_pair(ProbeFields& px, ProbeFields& py);

// int_{dOmega} grad G(.-x) . d_nu grad G(.-y) and the exterior Hessian energy
struct KernelTerms {
    double S = 0;  // surface pairing
    double E = 0;  // exterior volume energy
    bool ok = true;
};
KernelTerms kernel_terms(const Vec3& ext, const Vec3& x, const Vec3& y, double rtol);

struct IndicatorOptions {
    double quad_rtol = 1e-4;
    bool exterior_volume = true;  // evaluate the volume form of the exterior energy
};

// divergence of a solved field at an off-lattice point, centered differences of the interpolant
double point_divergence(const GridSpec& g, const VField& w, const Vec3& y);
// flags for points too close to the box or the obstacle for differencing
std::vector<std::string> proximity_flags(const GridSpec& g, const ObstacleSpec* ob, const Vec3& y);

Indicator probe_indicator_direct(const SchrodingerOperator& op, ProbeFields& px);
Indicator probe_lifting(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py);
Indicator ssm_indicator(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py);
Indicator i1_indicator(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py, const IndicatorOptions& o = {});
Indicator ips_decomposition(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o = {});
Indicator ips_decomposition(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py,
                            const IndicatorOptions& o = {});
Indicator ips_function(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o = {});
Indicator integro_differential_check(const SchrodingerOperator& op, ProbeFields& px, ProbeFields& py,
                                     const IndicatorOptions& o = {});
Indicator cim_indicator(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o = {});
Indicator weak_kernel_indicator(const SchrodingerOperator& op, const Vec3& x);

// pieces of the divergence of the V-harmonic lifting at x: Lambda_V pairing, surface term, volume term
struct W1Split {
    double dtn = 0, surface = 0, volume = 0, direct = 0;
};
W1Split w1_divergence_split(const SchrodingerOperator& op, ProbeFields& px, const IndicatorOptions& o = {});

struct JumpEstimate {
    double alpha = 0;
    std::vector<double> ratios;
    bool converged = true;
};
// ratio I(x) / int_D |grad G(.-x)|^2 along points approaching the obstacle, extrapolated to zero distance
JumpEstimate jump_magnitude_estimate(const SchrodingerOperator& op, const Mask& inD, const std::vector<Vec3>& line,
                                     const std::vector<double>& dist);

// needle-sequence estimates of the indicators, summed over j, one value per level
enum class LimitMode { Probe, Ssm, Cim, LiftProbe, LiftSsm };
const char* limit_mode_name(LimitMode m);
LimitMode parse_limit_mode(const std::string& s);
struct LimitSeries {
    LimitMode mode = LimitMode::Probe;
    std::vector<double> delta, value, rel_err;
    std::vector<bool> usable;
    double target = 0;  // direct-formula value
    // both look at the leading run of usable levels only
    int usable_levels() const;
    double final_rel_err() const;
    bool error_decreasing(int steps = 2) const;  // strictly over the last steps, i.e. the last steps + 1 levels
};
// sx: sequences for j = 0, 1, 2 at x (the needle tip); sy likewise at y for the lifting modes
LimitSeries dtn_limit_estimator(const SchrodingerOperator& op, const std::vector<NeedleSequence>& sx, LimitMode mode,
                                const std::vector<NeedleSequence>* sy = nullptr);

}  // namespace ips
