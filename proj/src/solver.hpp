#pragma once
#include <Eigen/Sparse>
#include <string>

#include "grid.hpp"
#include "potential.hpp"

namespace ips {

struct SolveStats {
    int iters = 0;
    double rel_res = 0;
};

// exact inverse of the Dirichlet 7-point Laplacian on interior arrays
class FastPoisson {
public:
    explicit FastPoisson(const GridSpec& g);
    void solve(const double* r, double* u) const;
    double lambda_min() const;  // smallest eigenvalue of -Lap_h

private:
    std::array<int, 3> n_;
    std::vector<double> inv_;  // 1/(eigenvalue * normalization)
    double lmin_;
};

class SchrodingerOperator {
public:
    SchrodingerOperator(const GridSpec& g, const Field& V, double rtol = 1e-13, int max_iter = 1000);

    const GridSpec& grid() const { return g_; }
    const Field& V() const { return V_; }
    std::size_t size() const { return g_.n_interior(); }
    bool zero_potential() const { return zeroV_; }

    void apply(const double* x, double* y) const;  // interior A x
    void precond(const double* r, double* z) const { P_.solve(r, z); }
    // boundary data + interior right side; u = g on the boundary, (-Lap_h + V) u = rhs inside
    Field solve(const BField& gb, const Field* rhs, SolveStats* st = nullptr) const;
    Field solve_laplace(const BField& gb, const Field* rhs = nullptr, SolveStats* st = nullptr) const;
    Eigen::SparseMatrix<double> matrix() const;
    double rtol() const { return rtol_; }

private:
    void pcg(const std::vector<double>& b, std::vector<double>& x, bool useV, SolveStats* st) const;
    std::vector<double> rhs_vector(const BField& gb, const Field* rhs) const;

    GridSpec g_;
    Field V_;
    std::vector<double> Vi_;
    bool zeroV_;
    FastPoisson P_;
    double rtol_;
    int max_iter_;
};

struct WellPosedness {
    double lambda_min = 0;
    int iters = 0;
    bool converged = false;
    bool near_singular = false;
    bool indefinite = false;
};
// smallest eigenvalue of the Dirichlet operator by preconditioned inverse iteration
WellPosedness check_wellposed(const SchrodingerOperator& op, double floor = 1e-2, int max_iter = 2000);
double discrete_lambda_min(const GridSpec& g);

BField apply_dtn(const SchrodingerOperator& op, const BField& f);
// a_h(u, e_i) at boundary node i: the weak normal flux; pairing with g is <Lambda f, g>
BField boundary_flux(const GridSpec& g, const Field& u);
double dtn_pairing(const SchrodingerOperator& op, const BField& f, const BField& gb);
// pairing of a solved field with boundary data; u must solve the operator's equation
double pairing_of_solution(const GridSpec& g, const Field& u, const BField& gb);

struct DtnMap {
    std::size_t nb = 0;
    std::vector<double> lambda;   // row-major, column j = Lambda e_j (normal derivative)
    std::vector<double> pairing;  // row-major M[i][j] = <Lambda e_j, e_i>
    bool from_cache = false;
};
DtnMap assemble_dense_dtn(const SchrodingerOperator& op, const std::string& cache_dir = "");
std::uint64_t grid_hash(const GridSpec& g);
std::uint64_t field_hash(const Field& f);

Field dense_oracle_solve(const SchrodingerOperator& op, const BField& gb, const Field* rhs);

}  // namespace ips
