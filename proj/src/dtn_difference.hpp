#pragma once
#include <cstdint>
#include <vector>

#include "fields.hpp"

namespace ips {

double bdot(const BField& a, const BField& b);

// (Lambda_V - Lambda_0) f as weak boundary fluxes; harmonic is the V = 0 extension of f
BField dtn_difference(const SchrodingerOperator& op, const BField& f, const Field& harmonic, SolveLog* log = nullptr);
BField dtn_difference(const SchrodingerOperator& op, const BField& f, SolveLog* log = nullptr);

// three evaluations of <(Lambda_V - Lambda_0) f, f>
struct DifferenceForms {
    double pairing = 0;       // boundary fluxes
    double alessandrini = 0;  // int V (u - v) v + int V v^2
    double energy = 0;        // -a_V(u - v, u - v) + int V v^2
};
DifferenceForms difference_forms(const SchrodingerOperator& op, const BField& f);

// h^3-weighted norms of u over the mask
double l2_norm(const GridSpec& g, const Field& u, const Mask& m);
double l1_norm(const GridSpec& g, const Field& u, const Mask& m);

// ||u - v||_{L2(D)} / ||v||_{L1(D)} over random harmonic v; u solves the V problem with the same trace
struct L1Control {
    double max_ratio = 0;
    double mean_ratio = 0;
    std::vector<double> ratios;
};
L1Control measure_l1_control(const SchrodingerOperator& op, const Mask& inD, int samples, std::uint64_t seed);

}  // namespace ips
