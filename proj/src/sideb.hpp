#pragma once
#include <string>
#include <vector>

#include "dtn_difference.hpp"
#include "needle.hpp"

namespace ips {

enum class SeqMethod { Probe, Ssm, Cim };
const char* method_name(SeqMethod m);
SeqMethod parse_method(const std::string& s);

struct SequenceLevel {
    int n = 0;
    double delta = 0;
    bool usable = true;   // fit met its tolerance and delta is resolved
    double value = 0;
    double identity = 0;  // ssm: value through the three-term identity; otherwise equal to value
    double l2 = 0, l1 = 0;  // norms on D of the field whose trace is paired
};

struct IndicatorSequence {
    Vec3 x{};
    int j = 0;
    SeqMethod method = SeqMethod::Probe;
    std::vector<SequenceLevel> levels;
    double identity_residual = 0;  // max over levels, relative to the largest pairing involved
    std::vector<double> values() const;
    std::vector<bool> usable() const;
};

// probe, ssm and cim sequences of one needle sequence; they share the solves
struct SequenceSet {
    IndicatorSequence probe, ssm, cim;
    double target_pairing = 0;  // <(Lambda_V - Lambda_0) t, t> with t the trace of d_j G(.-x)
    SolveLog log;
    const IndicatorSequence& get(SeqMethod m) const;
};
SequenceSet indicator_sequences(const SchrodingerOperator& op, const NeedleSequence& seq, const Mask& inD);
IndicatorSequence indicator_sequence(const SchrodingerOperator& op, const NeedleSequence& seq, SeqMethod m,
                                     const Mask& inD);

// limits of the three sequences for a needle avoiding D, from the solved fields at x
struct ComponentLimits {
    double probe = 0, ssm = 0, cim = 0;
    double get(SeqMethod m) const;
};
ComponentLimits sequence_limits(const SchrodingerOperator& op, ProbeFields& px, int j);

// +-I_n >= C ||v||^2 - C'' ||v|| ||v||_1 on D at one level
struct Certificate {
    double lhs = 0, rhs = 0;
    bool holds = false;
};
Certificate lower_bound_certificate(const IndicatorSequence& s, int level, int sign, double C, double Cpp);

struct DecisionRule {
    double growth_factor = 4.0;
    double spread_tol = 0.10;
    int min_levels = 3;
    // not diverging and every level within this factor of the first: bounded
    double bound_factor = 2.0;
};
enum class Trend { Diverges, Converges, Bounded, Undecided };
const char* trend_name(Trend t);
struct SeriesJudgement {
    Trend trend = Trend::Undecided;
    int used = 0;        // leading usable levels taken into account
    double growth = 0;   // |last| / |first|
    int sign = 0;        // sign of the last value
    double spread = 0;   // (max - min) / max|v| over the last three
};
// only the leading run of usable levels is judged
SeriesJudgement judge_series(const std::vector<double>& v, const std::vector<bool>& usable, const DecisionRule& r = {});

enum class Verdict { InsideDbar, Outside, Inconclusive };
const char* verdict_name(Verdict v);

struct NeedleEvidence {
    Needle needle;
    bool hits = false;  // only filled when the obstacle is known to the caller
    std::vector<double> values;
    SeriesJudgement judgement;
};
struct MembershipVerdict {
    Vec3 x{};
    Verdict verdict = Verdict::Inconclusive;
    SeqMethod method = SeqMethod::Probe;
    int j = 0;
    std::vector<NeedleEvidence> evidence;
};

// needles from the nearest face to x: the straight one and two tilted by angle_deg
std::vector<Needle> spread_needles(const GridSpec& g, const Vec3& x, int count = 3, double angle_deg = 35.0);

// sequence sets per needle, for one component
MembershipVerdict decide(const Vec3& x, const std::vector<Needle>& needles, const std::vector<const SequenceSet*>& sets,
                         SeqMethod m, int j, const DecisionRule& r = {});
// generates the needle sequences for component j and decides
MembershipVerdict classify_point(const SchrodingerOperator& op, const Vec3& x, const std::vector<Needle>& needles,
                                 SeqMethod m, int j, const Mask& inD, const NeedleParams& p = {},
                                 const DecisionRule& r = {});

}  // namespace ips
