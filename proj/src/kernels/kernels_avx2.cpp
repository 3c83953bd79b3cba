// Compiled with -mavx2 -mfma; only reached through the dispatcher after a
// CPU feature check.

#include <immintrin.h>

#include "kernels/backends.hpp"

namespace hom::kernels::avx2 {
namespace {

constexpr size_t kLanes = 4;

// Cephes-style exp: x = n ln2 + r, exp(r) from a (2,3) Pade form,
// scaled by 2^n through the exponent bits. Lanes below -708 flush to 0.
inline __m256d exp_pd(__m256d x)
{
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d lo = _mm256_set1_pd(-708.0);
    const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    __m256d n = _mm256_floor_pd(
        _mm256_add_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                      _mm256_set1_pd(0.5)));
    x = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(6.93145751953125e-1)));
    x = _mm256_sub_pd(x, _mm256_mul_pd(n, _mm256_set1_pd(1.42860682030941723212e-6)));

    const __m256d xx = _mm256_mul_pd(x, x);
    __m256d p = _mm256_set1_pd(1.26177193074810590878e-4);
    p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(3.02994407707441961300e-2));
    p = _mm256_fmadd_pd(p, xx, _mm256_set1_pd(9.99999999999999999910e-1));
    p = _mm256_mul_pd(p, x);
    __m256d q = _mm256_set1_pd(3.00198505138664455042e-6);
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.52448340349684104192e-3));
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.27265548208155028766e-1));
    q = _mm256_fmadd_pd(q, xx, _mm256_set1_pd(2.00000000000000000009e0));
    __m256d r = _mm256_div_pd(p, _mm256_sub_pd(q, p));
    r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

    __m256i e = _mm256_cvtepi32_epi64(_mm256_cvtpd_epi32(n));
    e = _mm256_slli_epi64(_mm256_add_epi64(e, _mm256_set1_epi64x(1023)), 52);
    r = _mm256_mul_pd(r, _mm256_castsi256_pd(e));
    return _mm256_andnot_pd(underflow, r);
}

// Exact for integral v with |v| < 2^51.
inline __m256i to_int64(__m256d v)
{
    const __m256d magic = _mm256_set1_pd(6755399441055744.0);  // 1.5 * 2^52
    return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(v, magic)),
                            _mm256_castpd_si256(magic));
}

// Exact for integral v with 0 <= v < 2^52.
inline __m256i to_uint52(__m256d v)
{
    const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
    return _mm256_sub_epi64(_mm256_castpd_si256(_mm256_add_pd(v, magic)),
                            _mm256_castpd_si256(magic));
}

// Runs body(in, out) over full vectors, then once over a padded copy of
// the tail so every element goes through the same instructions.
template <class In, class Out, class Body>
inline void for_each_vector(const In* in, size_t n, Out* out, In pad, Body body)
{
    size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        body(in + i, out + i);
    }
    if (i < n) {
        alignas(32) In tmp_in[kLanes] = {pad, pad, pad, pad};
        alignas(32) Out tmp_out[kLanes];
        for (size_t j = 0; i + j < n; ++j) tmp_in[j] = in[i + j];
        body(tmp_in, tmp_out);
        for (size_t j = 0; i + j < n; ++j) out[i + j] = tmp_out[j];
    }
}

}  // namespace

void quantize(const double* t_ns, size_t n, double resolution_ps, int64_t* ticks)
{
    const __m256d scale = _mm256_set1_pd(1000.0);
    const __m256d res = _mm256_set1_pd(resolution_ps);
    for_each_vector(t_ns, n, ticks, 0.0, [&](const double* in, int64_t* out) {
        __m256d v = _mm256_div_pd(_mm256_mul_pd(_mm256_loadu_pd(in), scale), res);
        v = _mm256_floor_pd(v);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out), to_uint52(v));
    });
}

void bin_index(const double* x, size_t n, double lo, double width, int64_t* out)
{
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vw = _mm256_set1_pd(width);
    const __m256d qmin = _mm256_set1_pd(-1.0);
    const __m256d qmax = _mm256_set1_pd(1073741824.0);
    for_each_vector(x, n, out, lo, [&](const double* in, int64_t* o) {
        __m256d q = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(in), vlo), vw);
        q = _mm256_min_pd(_mm256_max_pd(q, qmin), qmax);
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(o), to_int64(_mm256_floor_pd(q)));
    });
}

void coincidence_density(const DensityParams& p, const double* dt, size_t n, double* out)
{
    const __m256d zero = _mm256_setzero_pd();
    const __m256d inv_f = _mm256_set1_pd(p.inv_tau_f);
    const __m256d neg_inv_s = _mm256_set1_pd(-p.inv_tau_s);
    const __m256d shift = _mm256_set1_pd(p.shift);
    const __m256d neg_half_rate = _mm256_set1_pd(-p.half_rate);
    const __m256d two_cross = _mm256_set1_pd(2.0 * p.cross);
    const __m256d scale = _mm256_set1_pd(0.25 * p.norm);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);

    // exp(-c/tau_s) for c >= 0, exp(c/tau_f) otherwise
    auto single = [&](__m256d c) {
        const __m256d pos = _mm256_cmp_pd(c, zero, _CMP_GE_OQ);
        const __m256d arg = _mm256_blendv_pd(_mm256_mul_pd(c, inv_f),
                                             _mm256_mul_pd(c, neg_inv_s), pos);
        return exp_pd(arg);
    };

    for_each_vector(dt, n, out, 0.0, [&](const double* in, double* o) {
        const __m256d d = _mm256_loadu_pd(in);
        const __m256d nd = _mm256_xor_pd(d, sign_mask);
        const __m256d abs_d = _mm256_andnot_pd(sign_mask, d);
        const __m256d s1 = single(_mm256_sub_pd(d, shift));
        const __m256d s2 = single(_mm256_sub_pd(nd, shift));
        const __m256d cross = _mm256_mul_pd(two_cross, exp_pd(_mm256_mul_pd(neg_half_rate, abs_d)));
        _mm256_storeu_pd(o, _mm256_mul_pd(scale, _mm256_sub_pd(_mm256_add_pd(s1, s2), cross)));
    });
}

}  // namespace hom::kernels::avx2
