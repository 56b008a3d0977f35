#pragma once
#include <vector>

namespace ips {

// unnormalized type-I sine transform (FFTW RODFT00) over a row-major block; dims.size() in {1,2,3}
void dst1(const std::vector<int>& dims, const double* in, double* out);

}  // namespace ips
