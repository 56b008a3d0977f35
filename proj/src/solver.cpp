#include "solver.hpp"

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "dst.hpp"
#include "kernel.hpp"

namespace ips {

FastPoisson::FastPoisson(const GridSpec& g) : n_(g.n) {
    std::vector<double> lam[3];
    for (int a = 0; a < 3; ++a) {
        lam[a].resize(n_[a]);
        for (int p = 0; p < n_[a]; ++p)
            lam[a][p] = (2 - 2 * std::cos((p + 1) * kPi / (n_[a] + 1))) / (g.h[a] * g.h[a]);
    }
    double norm = 8.0 * (n_[0] + 1) * (n_[1] + 1) * (n_[2] + 1);
    inv_.resize(std::size_t(n_[0]) * n_[1] * n_[2]);
    std::size_t s = 0;
    for (int p = 0; p < n_[0]; ++p)
        for (int q = 0; q < n_[1]; ++q)
            for (int r = 0; r < n_[2]; ++r) inv_[s++] = 1.0 / ((lam[0][p] + lam[1][q] + lam[2][r]) * norm);
    lmin_ = lam[0][0] + lam[1][0] + lam[2][0];
}

double FastPoisson::lambda_min() const { return lmin_; }

void FastPoisson::solve(const double* r, double* u) const {
    std::vector<double> t(inv_.size());
    dst1({n_[0], n_[1], n_[2]}, r, t.data());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] *= inv_[i];
    dst1({n_[0], n_[1], n_[2]}, t.data(), u);
}

double discrete_lambda_min(const GridSpec& g) { return FastPoisson(g).lambda_min(); }

SchrodingerOperator::SchrodingerOperator(const GridSpec& g, const Field& V, double rtol, int max_iter)
    : g_(g), V_(V), P_(g), rtol_(rtol), max_iter_(max_iter) {
    if (V.size() != g.lattice) throw Error(E_ARG, "potential size mismatch");
    Vi_.resize(g.n_interior());
    zeroV_ = true;
    for (std::size_t s = 0; s < Vi_.size(); ++s) {
        Vi_[s] = V[g.interior[s]];
        if (Vi_[s] != 0) zeroV_ = false;
    }
}

void SchrodingerOperator::apply(const double* x, double* y) const {
    const int n0 = g_.n[0], n1 = g_.n[1], n2 = g_.n[2];
    const double c0 = 1 / (g_.h[0] * g_.h[0]), c1 = 1 / (g_.h[1] * g_.h[1]), c2 = 1 / (g_.h[2] * g_.h[2]);
    const std::size_t s0 = std::size_t(n1) * n2, s1 = n2;
    for (int i = 0; i < n0; ++i)
        for (int j = 0; j < n1; ++j)
            for (int k = 0; k < n2; ++k) {
                std::size_t s = i * s0 + j * s1 + k;
                double xc = x[s];
                double v = (2 * c0 + 2 * c1 + 2 * c2 + Vi_[s]) * xc;
                if (i > 0) v -= c0 * x[s - s0];
                if (i < n0 - 1) v -= c0 * x[s + s0];
                if (j > 0) v -= c1 * x[s - s1];
                if (j < n1 - 1) v -= c1 * x[s + s1];
                if (k > 0) v -= c2 * x[s - 1];
                if (k < n2 - 1) v -= c2 * x[s + 1];
                y[s] = v;
            }
}

std::vector<double> SchrodingerOperator::rhs_vector(const BField& gb, const Field* rhs) const {
    if (gb.size() != g_.n_boundary()) throw Error(E_ARG, "boundary data size mismatch");
    if (rhs && rhs->size() != g_.lattice) throw Error(E_ARG, "right side size mismatch");
    std::vector<double> b(g_.n_interior(), 0.0);
    const std::int64_t st[3] = {std::int64_t(g_.N[1]) * g_.N[2], g_.N[2], 1};
    for (std::size_t s = 0; s < b.size(); ++s) {
        auto l = g_.interior[s];
        double v = rhs ? (*rhs)[l] : 0.0;
        for (int a = 0; a < 3; ++a) {
            double c = 1 / (g_.h[a] * g_.h[a]);
            for (auto nb : {l - st[a], l + st[a]}) {
                auto bs = g_.bslot[nb];
                if (bs >= 0) v += c * gb[bs];
            }
        }
        b[s] = v;
    }
    return b;
}

static double dotv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void SchrodingerOperator::pcg(const std::vector<double>& b, std::vector<double>& x, bool useV,
                              SolveStats* st) const {
    const std::size_t n = b.size();
    x.assign(n, 0.0);
    double bn = std::sqrt(dotv(b, b));
    if (st) *st = SolveStats{};
    if (bn == 0) return;
    P_.solve(b.data(), x.data());
    if (!useV || zeroV_) {
        if (st) st->rel_res = 0;
        return;
    }
    std::vector<double> r(n), z(n), p(n), q(n);
    apply(x.data(), q.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    double rn = std::sqrt(dotv(r, r));
    int it = 0;
    if (rn > rtol_ * bn) {
        P_.solve(r.data(), z.data());
        p = z;
        double rz = dotv(r, z);
        for (it = 1; it <= max_iter_; ++it) {
            apply(p.data(), q.data());
            double pq = dotv(p, q);
            if (!(pq > 0)) throw Error(E_NUMERIC, "conjugate gradient breakdown (operator not positive definite)");
            double al = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += al * p[i];
                r[i] -= al * q[i];
            }
            rn = std::sqrt(dotv(r, r));
            if (rn <= rtol_ * bn) break;
            P_.solve(r.data(), z.data());
            double rz2 = dotv(r, z);
            double be = rz2 / rz;
            rz = rz2;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + be * p[i];
        }
        if (rn > rtol_ * bn) throw Error(E_NUMERIC, "conjugate gradient did not converge");
    }
    if (st) {
        st->iters = it;
        st->rel_res = rn / bn;
    }
}

Field SchrodingerOperator::solve(const BField& gb, const Field* rhs, SolveStats* st) const {
    auto b = rhs_vector(gb, rhs);
    std::vector<double> x;
    pcg(b, x, true, st);
    Field u = zeros(g_);
    set_trace(g_, u, gb);
    for (std::size_t s = 0; s < x.size(); ++s) u[g_.interior[s]] = x[s];
    return u;
}

Field SchrodingerOperator::solve_laplace(const BField& gb, const Field* rhs, SolveStats* st) const {
    auto b = rhs_vector(gb, rhs);
    std::vector<double> x;
    pcg(b, x, false, st);
    Field u = zeros(g_);
    set_trace(g_, u, gb);
    for (std::size_t s = 0; s < x.size(); ++s) u[g_.interior[s]] = x[s];
    return u;
}

Eigen::SparseMatrix<double> SchrodingerOperator::matrix() const {
    const std::size_t n = size();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(7 * n);
    const std::int64_t st[3] = {std::int64_t(g_.N[1]) * g_.N[2], g_.N[2], 1};
    for (std::size_t s = 0; s < n; ++s) {
        auto l = g_.interior[s];
        double d = Vi_[s];
        for (int a = 0; a < 3; ++a) {
            double c = 1 / (g_.h[a] * g_.h[a]);
            d += 2 * c;
            for (auto nb : {l - st[a], l + st[a]}) {
                auto is = g_.islot[nb];
                if (is >= 0) t.emplace_back(int(s), int(is), -c);
            }
        }
        t.emplace_back(int(s), int(s), d);
    }
    Eigen::SparseMatrix<double> A{Eigen::Index(n), Eigen::Index(n)};
    A.setFromTriplets(t.begin(), t.end());
    return A;
}

WellPosedness check_wellposed(const SchrodingerOperator& op, double floor, int max_iter) {
    const auto& g = op.grid();
    const std::size_t n = op.size();
    WellPosedness w;
    // start from the lowest Laplacian mode plus a fixed perturbation
    std::vector<double> x(n), Ax(n), r(n), z(n);
    for (std::size_t s = 0; s < n; ++s) {
        int i, j, k;
        g.ijk(g.interior[s], i, j, k);
        x[s] = std::sin(kPi * i / (g.n[0] + 1)) * std::sin(kPi * j / (g.n[1] + 1)) * std::sin(kPi * k / (g.n[2] + 1)) +
               1e-3 * std::sin(2.7 * i + 1.3 * j + 0.7 * k);
    }
    auto normalize = [&](std::vector<double>& v) {
        double s = std::sqrt(dotv(v, v));
        for (auto& c : v) c /= s;
    };
    normalize(x);
    double rho = 0, prev = 1e300;
    double scale = 0;
    for (int a = 0; a < 3; ++a) scale += 4 / (g.h[a] * g.h[a]);
    for (int it = 1; it <= max_iter; ++it) {
        op.apply(x.data(), Ax.data());
        rho = dotv(x, Ax);
        for (std::size_t s = 0; s < n; ++s) r[s] = Ax[s] - rho * x[s];
        double rn = std::sqrt(dotv(r, r));
        w.iters = it;
        if (rn <= 1e-9 * scale || (std::abs(rho - prev) <= 1e-13 * scale && rn <= 1e-6 * scale)) {
            w.converged = true;
            break;
        }
        prev = rho;
        op.precond(r.data(), z.data());
        for (std::size_t s = 0; s < n; ++s) x[s] -= z[s];
        normalize(x);
    }
    w.lambda_min = rho;
    w.indefinite = rho < -floor;
    w.near_singular = std::abs(rho) < floor;
    return w;
}

BField apply_dtn(const SchrodingerOperator& op, const BField& f) {
    return normal_derivative(op.grid(), op.solve(f, nullptr));
}

static inline double tw(int i, int N) { return (i == 0 || i == N - 1) ? 0.5 : 1.0; }

BField boundary_flux(const GridSpec& g, const Field& u) {
    BField r(g.n_boundary(), 0.0);
    const std::int64_t st[3] = {std::int64_t(g.N[1]) * g.N[2], g.N[2], 1};
    for (std::size_t s = 0; s < r.size(); ++s) {
        auto l = g.boundary[s];
        int c[3];
        g.ijk(l, c[0], c[1], c[2]);
        double v = 0;
        for (int a = 0; a < 3; ++a) {
            int b = (a + 1) % 3, d = (a + 2) % 3;
            double w = g.cell() / (g.h[a] * g.h[a]) * tw(c[b], g.N[b]) * tw(c[d], g.N[d]);
            if (c[a] > 0) v += w * (u[l] - u[l - st[a]]);
            if (c[a] < g.N[a] - 1) v += w * (u[l] - u[l + st[a]]);
        }
        r[s] = v;
    }
    return r;
}

double pairing_of_solution(const GridSpec& g, const Field& u, const BField& gb) {
    auto fl = boundary_flux(g, u);
    double s = 0;
    for (std::size_t i = 0; i < fl.size(); ++i) s += fl[i] * gb[i];
    return s;
}

double dtn_pairing(const SchrodingerOperator& op, const BField& f, const BField& gb) {
    // a_h(u_f, E g) does not depend on the extension E because a_h(u_f, .) vanishes on interior nodes
    return pairing_of_solution(op.grid(), op.solve(f, nullptr), gb);
}

static std::uint64_t fnv(const void* p, std::size_t n, std::uint64_t h = 1469598103934665603ull) {
    auto c = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= c[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t grid_hash(const GridSpec& g) {
    std::uint64_t h = fnv(g.ext.data(), sizeof(double) * 3);
    return fnv(g.n.data(), sizeof(int) * 3, h);
}

std::uint64_t field_hash(const Field& f) { return fnv(f.data(), f.size() * sizeof(double)); }

namespace {
constexpr char kMagic[8] = {'I', 'P', 'S', 'D', 'T', 'N', '0', '1'};
constexpr std::uint32_t kVersion = 1;
struct Header {
    char magic[8];
    std::uint32_t version;
    std::uint32_t nmat;
    std::uint64_t ghash, vhash, nb;
};

bool read_cache(const std::string& path, const Header& want, DtnMap& m) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    Header h{};
    in.read(reinterpret_cast<char*>(&h), sizeof h);
    if (!in || std::memcmp(h.magic, kMagic, 8) != 0 || h.version != want.version || h.ghash != want.ghash ||
        h.vhash != want.vhash || h.nb != want.nb || h.nmat != 2)
        return false;
    m.nb = h.nb;
    m.lambda.resize(h.nb * h.nb);
    m.pairing.resize(h.nb * h.nb);
    in.read(reinterpret_cast<char*>(m.lambda.data()), std::streamsize(m.lambda.size() * sizeof(double)));
    in.read(reinterpret_cast<char*>(m.pairing.data()), std::streamsize(m.pairing.size() * sizeof(double)));
    return bool(in);
}

void write_cache(const std::string& path, const Header& h, const DtnMap& m) {
    static std::atomic<int> counter{0};
    std::string tmp = path + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error(E_IO, "cannot write cache file " + tmp);
        out.write(reinterpret_cast<const char*>(&h), sizeof h);
        out.write(reinterpret_cast<const char*>(m.lambda.data()), std::streamsize(m.lambda.size() * sizeof(double)));
        out.write(reinterpret_cast<const char*>(m.pairing.data()), std::streamsize(m.pairing.size() * sizeof(double)));
        if (!out) throw Error(E_IO, "cache write failed");
    }
    std::filesystem::rename(tmp, path);
}
}  // namespace

DtnMap assemble_dense_dtn(const SchrodingerOperator& op, const std::string& cache_dir) {
    const auto& g = op.grid();
    const std::size_t nb = g.n_boundary();
    if (nb > 20000) throw Error(E_ARG, "too many boundary nodes for a dense DtN map");
    Header h{};
    std::memcpy(h.magic, kMagic, 8);
    h.version = kVersion;
    h.nmat = 2;
    h.ghash = grid_hash(g);
    h.vhash = field_hash(op.V());
    h.nb = nb;
    std::string path;
    DtnMap m;
    if (!cache_dir.empty()) {
        std::filesystem::create_directories(cache_dir);
        char name[64];
        std::snprintf(name, sizeof name, "dtn_%016llx_%016llx.bin", (unsigned long long)h.ghash,
                      (unsigned long long)h.vhash);
        path = (std::filesystem::path(cache_dir) / name).string();
        if (read_cache(path, h, m)) {
            m.from_cache = true;
            return m;
        }
    }
    m.nb = nb;
    m.lambda.assign(nb * nb, 0.0);
    m.pairing.assign(nb * nb, 0.0);
    BField e(nb, 0.0);
    for (std::size_t j = 0; j < nb; ++j) {
        e[j] = 1;
        Field u = op.solve(e, nullptr);
        e[j] = 0;
        auto dn = normal_derivative(g, u);
        auto fl = boundary_flux(g, u);
        for (std::size_t i = 0; i < nb; ++i) {
            m.lambda[i * nb + j] = dn[i];
            m.pairing[i * nb + j] = fl[i];
        }
    }
    if (!path.empty()) write_cache(path, h, m);
    return m;
}

Field dense_oracle_solve(const SchrodingerOperator& op, const BField& gb, const Field* rhs) {
    const auto& g = op.grid();
    const std::size_t n = op.size();
    if (n > 1331) throw Error(E_ARG, "dense oracle limited to 1331 interior nodes");
    Eigen::MatrixXd A = Eigen::MatrixXd(op.matrix());
    // right side assembled independently of the iterative path
    Eigen::VectorXd b{Eigen::Index(n)};
    const std::int64_t st[3] = {std::int64_t(g.N[1]) * g.N[2], g.N[2], 1};
    for (std::size_t s = 0; s < n; ++s) {
        auto l = g.interior[s];
        double v = rhs ? (*rhs)[l] : 0.0;
        for (int a = 0; a < 3; ++a)
            for (auto nbr : {l - st[a], l + st[a]})
                if (g.bslot[nbr] >= 0) v += gb[g.bslot[nbr]] / (g.h[a] * g.h[a]);
        b[long(s)] = v;
    }
    Eigen::VectorXd x = A.partialPivLu().solve(b);
    Field u = zeros(g);
    set_trace(g, u, gb);
    for (std::size_t s = 0; s < n; ++s) u[g.interior[s]] = x[long(s)];
    return u;
}

}  // namespace ips
