#include <algorithm>
#include <cmath>

#include "kernels/backends.hpp"

namespace hom::kernels::scalar {

void quantize(const double* t_ns, size_t n, double resolution_ps, int64_t* ticks)
{
    for (size_t i = 0; i < n; ++i) {
        ticks[i] = static_cast<int64_t>(std::floor(t_ns[i] * 1000.0 / resolution_ps));
    }
}

void bin_index(const double* x, size_t n, double lo, double width, int64_t* out)
{
    for (size_t i = 0; i < n; ++i) {
        double q = (x[i] - lo) / width;
        q = std::min(std::max(q, -1.0), 1073741824.0);
        out[i] = static_cast<int64_t>(std::floor(q));
    }
}

void coincidence_density(const DensityParams& p, const double* dt, size_t n, double* out)
{
    auto single = [&p](double c) {
        return c >= 0.0 ? std::exp(-c * p.inv_tau_s) : std::exp(c * p.inv_tau_f);
    };
    for (size_t i = 0; i < n; ++i) {
        const double d = dt[i];
        double cross = p.cross * std::exp(-p.half_rate * std::abs(d));
        if (p.omega != 0.0) {
            cross *= std::cos(p.omega * d);
        }
        out[i] = 0.25 * p.norm * (single(d - p.shift) + single(-d - p.shift) - 2.0 * cross);
    }
}

}  // namespace hom::kernels::scalar
