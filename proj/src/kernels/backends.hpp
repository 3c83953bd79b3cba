#pragma once

// Raw-pointer entry points of each backend. Kept free of standard-library
// templates so the AVX2 translation unit, compiled with -mavx2, exports no
// inline functions that could leak into the rest of the program.

#include <stddef.h>
#include <stdint.h>

#include "hom/density_params.hpp"

namespace hom::kernels::scalar {
void quantize(const double* t_ns, size_t n, double resolution_ps, int64_t* ticks);
void bin_index(const double* x, size_t n, double lo, double width, int64_t* out);
void coincidence_density(const DensityParams& p, const double* dt, size_t n, double* out);
}  // namespace hom::kernels::scalar

namespace hom::kernels::avx2 {
void quantize(const double* t_ns, size_t n, double resolution_ps, int64_t* ticks);
void bin_index(const double* x, size_t n, double lo, double width, int64_t* out);
void coincidence_density(const DensityParams& p, const double* dt, size_t n, double* out);
}  // namespace hom::kernels::avx2

namespace hom::kernels::neon {
void quantize(const double* t_ns, size_t n, double resolution_ps, int64_t* ticks);
void bin_index(const double* x, size_t n, double lo, double width, int64_t* out);
void coincidence_density(const DensityParams& p, const double* dt, size_t n, double* out);
}  // namespace hom::kernels::neon
