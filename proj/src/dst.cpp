#include "dst.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace ips {

namespace {
struct PlanCache {
    std::mutex mu;
    std::map<std::vector<int>, fftw_plan> plans;
    ~PlanCache() {
        for (auto& [k, p] : plans) fftw_destroy_plan(p);
    }
    fftw_plan get(const std::vector<int>& dims) {
        std::lock_guard<std::mutex> lk(mu);
        auto it = plans.find(dims);
        if (it != plans.end()) return it->second;
        std::size_t n = 1;
        for (int d : dims) n *= std::size_t(d);
        double* a = fftw_alloc_real(n);
        double* b = fftw_alloc_real(n);
        std::vector<fftw_r2r_kind> kinds(dims.size(), FFTW_RODFT00);
        fftw_plan p = fftw_plan_r2r(int(dims.size()), dims.data(), a, b, kinds.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
        fftw_free(a);
        fftw_free(b);
        plans[dims] = p;
        return p;
    }
};
PlanCache& cache() {
    static PlanCache c;
    return c;
}
}  // namespace

void dst1(const std::vector<int>& dims, const double* in, double* out) {
    fftw_plan p = cache().get(dims);
    fftw_execute_r2r(p, const_cast<double*>(in), out);
}

}  // namespace ips
