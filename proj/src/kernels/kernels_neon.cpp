// AArch64 Advanced SIMD variants, two doubles per vector.

#include <arm_neon.h>

#include "kernels/backends.hpp"

namespace hom::kernels::neon {
namespace {

constexpr size_t kLanes = 2;

inline float64x2_t exp_pd(float64x2_t x)
{
    const float64x2_t lo = vdupq_n_f64(-708.0);
    const uint64x2_t underflow = vcltq_f64(x, lo);
    x = vminq_f64(vmaxq_f64(x, lo), vdupq_n_f64(709.0));

    const float64x2_t n =
        vrndmq_f64(vaddq_f64(vmulq_f64(x, vdupq_n_f64(1.4426950408889634073599)), vdupq_n_f64(0.5)));
    x = vsubq_f64(x, vmulq_f64(n, vdupq_n_f64(6.93145751953125e-1)));
    x = vsubq_f64(x, vmulq_f64(n, vdupq_n_f64(1.42860682030941723212e-6)));

    const float64x2_t xx = vmulq_f64(x, x);
    float64x2_t p = vdupq_n_f64(1.26177193074810590878e-4);
    p = vfmaq_f64(vdupq_n_f64(3.02994407707441961300e-2), p, xx);
    p = vfmaq_f64(vdupq_n_f64(9.99999999999999999910e-1), p, xx);
    p = vmulq_f64(p, x);
    float64x2_t q = vdupq_n_f64(3.00198505138664455042e-6);
    q = vfmaq_f64(vdupq_n_f64(2.52448340349684104192e-3), q, xx);
    q = vfmaq_f64(vdupq_n_f64(2.27265548208155028766e-1), q, xx);
    q = vfmaq_f64(vdupq_n_f64(2.00000000000000000009e0), q, xx);
    float64x2_t r = vdivq_f64(p, vsubq_f64(q, p));
    r = vfmaq_f64(vdupq_n_f64(1.0), vdupq_n_f64(2.0), r);

    int64x2_t e = vaddq_s64(vcvtq_s64_f64(n), vdupq_n_s64(1023));
    e = vshlq_n_s64(e, 52);
    r = vmulq_f64(r, vreinterpretq_f64_s64(e));
    return vreinterpretq_f64_u64(vbicq_u64(vreinterpretq_u64_f64(r), underflow));
}

template <class In, class Out, class Body>
inline void for_each_vector(const In* in, size_t n, Out* out, In pad, Body body)
{
    size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        body(in + i, out + i);
    }
    if (i < n) {
        In tmp_in[kLanes] = {pad, pad};
        Out tmp_out[kLanes];
        tmp_in[0] = in[i];
        body(tmp_in, tmp_out);
        out[i] = tmp_out[0];
    }
}

}  // namespace

void quantize(const double* t_ns, size_t n, double resolution_ps, int64_t* ticks)
{
    const float64x2_t scale = vdupq_n_f64(1000.0);
    const float64x2_t res = vdupq_n_f64(resolution_ps);
    for_each_vector(t_ns, n, ticks, 0.0, [&](const double* in, int64_t* out) {
        float64x2_t v = vrndmq_f64(vdivq_f64(vmulq_f64(vld1q_f64(in), scale), res));
        vst1q_s64(out, vcvtq_s64_f64(v));
    });
}

void bin_index(const double* x, size_t n, double lo, double width, int64_t* out)
{
    const float64x2_t vlo = vdupq_n_f64(lo);
    const float64x2_t vw = vdupq_n_f64(width);
    const float64x2_t qmin = vdupq_n_f64(-1.0);
    const float64x2_t qmax = vdupq_n_f64(1073741824.0);
    for_each_vector(x, n, out, lo, [&](const double* in, int64_t* o) {
        float64x2_t q = vdivq_f64(vsubq_f64(vld1q_f64(in), vlo), vw);
        q = vminq_f64(vmaxq_f64(q, qmin), qmax);
        vst1q_s64(o, vcvtq_s64_f64(vrndmq_f64(q)));
    });
}

void coincidence_density(const DensityParams& p, const double* dt, size_t n, double* out)
{
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t inv_f = vdupq_n_f64(p.inv_tau_f);
    const float64x2_t neg_inv_s = vdupq_n_f64(-p.inv_tau_s);
    const float64x2_t shift = vdupq_n_f64(p.shift);
    const float64x2_t neg_half_rate = vdupq_n_f64(-p.half_rate);
    const float64x2_t two_cross = vdupq_n_f64(2.0 * p.cross);
    const float64x2_t scale = vdupq_n_f64(0.25 * p.norm);

    auto single = [&](float64x2_t c) {
        const uint64x2_t pos = vcgeq_f64(c, zero);
        return exp_pd(vbslq_f64(pos, vmulq_f64(c, neg_inv_s), vmulq_f64(c, inv_f)));
    };

    for_each_vector(dt, n, out, 0.0, [&](const double* in, double* o) {
        const float64x2_t d = vld1q_f64(in);
        const float64x2_t s1 = single(vsubq_f64(d, shift));
        const float64x2_t s2 = single(vsubq_f64(vnegq_f64(d), shift));
        const float64x2_t cross =
            vmulq_f64(two_cross, exp_pd(vmulq_f64(neg_half_rate, vabsq_f64(d))));
        vst1q_f64(o, vmulq_f64(scale, vsubq_f64(vaddq_f64(s1, s2), cross)));
    });
}

}  // namespace hom::kernels::neon
