#pragma once
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"
#include "sideb.hpp"

namespace ips {

// runs fn(0..n-1) on up to `threads` workers; results must be written by index
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// one of scan_method_names() at the probe point
Indicator evaluate_method(const SchrodingerOperator& op, ProbeFields& px, const std::string& m,
                          const IndicatorOptions& quad);

struct RateFit {
    double exponent = 0, intercept = 0, r2 = 0;
    int points = 0;
    int sign = 0;             // sign of the values that were fitted
    bool sign_split = false;  // some values had the other sign or were zero and were left out
};
// least squares of log|v| against log d; d positive and decreasing, at least 4 points
RateFit fit_rate(const std::vector<double>& d, const std::vector<double>& v);
// sign * v increasing over the last k points
bool monotone_tail(const std::vector<double>& v, int sign, int k = 5);

struct PointResult {
    std::string set;
    int index = 0;
    Vec3 requested{}, x{};
    double distance = 0;  // to the line target, lines only
    bool ok = true;
    std::string error;
    std::map<std::string, double> values;     // method -> value
    std::map<std::string, double> check_err;  // method.check -> relative error
    std::vector<std::string> flags;
    SolveLog log;
};

struct LineFit {
    std::string set, method;
    RateFit fit;
    bool monotone = false;
    std::vector<double> d, v;
};

struct RunInfo {
    std::string name;
    std::uint64_t hash = 0;
    std::string config_text;
    std::array<int, 3> n{};
    Vec3 h{};
    WellPosedness wp;
};

struct ScanReport {
    RunInfo info;
    std::vector<std::string> methods;
    std::vector<PointResult> points;
    std::vector<LineFit> fits;
};

// throws E_WELLPOSED when the operator is not coercive enough
RunInfo prepare_run(const ExperimentConfig& c, const GridSpec& g, const SchrodingerOperator& op);

ScanReport run_scan(const ExperimentConfig& c, int threads);

struct ClassifyRow {
    Vec3 requested{}, x{};
    double dist_D = 0;  // signed distance to the obstacle boundary, negative inside
    bool ok = true;
    std::string error;
    std::vector<MembershipVerdict> verdicts;  // per (method, component)
    std::vector<std::vector<bool>> hits;      // per verdict and needle
};
struct ClassifyReport {
    RunInfo info;
    std::vector<ClassifyRow> rows;
};
ClassifyReport run_classify(const ExperimentConfig& c, int threads);

struct NeedleRun {
    Needle needle;
    bool hits = false;
    bool ok = true;
    std::string error;
    std::vector<NeedleSequence> seqs;  // j = 0, 1, 2
    std::vector<SequenceSet> sets;     // per j, when an obstacle is present
    std::vector<LimitSeries> limits;   // probe, ssm, cim summed over j, for needles avoiding D
};
struct NeedleReport {
    RunInfo info;
    std::vector<NeedleRun> runs;
    Mask inD;
    GridSpec grid;
};
NeedleReport run_needles(const ExperimentConfig& c, int threads);

struct ForwardReport {
    RunInfo info;
    int solves = 0;
    double max_rel_res = 0;
    double max_alessandrini_err = 0, max_energy_err = 0;
    double symmetry_err = 0;  // dense DtN pairing asymmetry, when assembled
    bool dense = false;
    L1Control l1;
};
ForwardReport run_forward(const ExperimentConfig& c, int threads);

struct RatesReport {
    std::vector<std::pair<std::string, RateFit>> fits;
    double sphere_rel_err = 0;
    std::vector<double> i1_d, i1_v;
    bool i1_monotone = false;
};
RatesReport run_rates(const ExperimentConfig& c, int threads);

// writers create the directory; all numbers are printed with a fixed format
void emit_report(const ScanReport& r, const std::string& dir);
void emit_report(const ClassifyReport& r, const std::string& dir);
void emit_report(const NeedleReport& r, const std::string& dir);
void emit_report(const ForwardReport& r, const std::string& dir);
void emit_report(const RatesReport& r, const std::string& dir);

std::string fmt_num(double v);

}  // namespace ips
