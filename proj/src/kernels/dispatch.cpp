#include <atomic>
#include <cmath>
#include <cstdlib>
#include <string>

#include "hom/error.hpp"
#include "hom/kernels.hpp"
#include "kernels/backends.hpp"

namespace hom::kernels {
namespace {

bool cpu_has_avx2()
{
#if defined(HOM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect()
{
    if (const char* forced = std::getenv("HOM_KERNELS")) {
        const std::string want(forced);
        for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
            if (want == name(b) && available(b)) return b;
        }
    }
    if (available(Backend::avx2)) return Backend::avx2;
    if (available(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

std::atomic<Backend>& current()
{
    static std::atomic<Backend> backend{detect()};
    return backend;
}

void check_sizes(std::size_t in, std::size_t out)
{
    if (out < in) throw ConfigError("kernel output span shorter than input");
}

}  // namespace

std::string_view name(Backend backend)
{
    switch (backend) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
    }
    return "unknown";
}

bool available(Backend backend)
{
    switch (backend) {
    case Backend::scalar: return true;
    case Backend::avx2: {
        static const bool ok = cpu_has_avx2();
        return ok;
    }
    case Backend::neon:
#if defined(HOM_HAVE_NEON)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void select_backend(Backend backend)
{
    if (!available(backend)) {
        throw ConfigError("kernel backend not available: " + std::string(name(backend)));
    }
    current().store(backend, std::memory_order_relaxed);
}

void quantize(std::span<const double> t_ns, double resolution_ps, std::span<std::int64_t> ticks)
{
    check_sizes(t_ns.size(), ticks.size());
    if (!(resolution_ps > 0.0) || !std::isfinite(resolution_ps)) {
        throw ConfigError("timestamp resolution must be positive");
    }
    const double limit = 4503599627370496.0 * resolution_ps / 1000.0;  // 2^52 ticks
    for (double t : t_ns) {
        if (!(t >= 0.0)) throw ConfigError("cannot quantize negative time " + std::to_string(t));
        if (!(t < limit)) throw ConfigError("time beyond timestamp range: " + std::to_string(t));
    }
    switch (active_backend()) {
#if defined(HOM_HAVE_AVX2)
    case Backend::avx2: return avx2::quantize(t_ns.data(), t_ns.size(), resolution_ps, ticks.data());
#endif
#if defined(HOM_HAVE_NEON)
    case Backend::neon: return neon::quantize(t_ns.data(), t_ns.size(), resolution_ps, ticks.data());
#endif
    default: return scalar::quantize(t_ns.data(), t_ns.size(), resolution_ps, ticks.data());
    }
}

void bin_index(std::span<const double> x, double lo, double width, std::span<std::int64_t> out)
{
    check_sizes(x.size(), out.size());
    if (!(width > 0.0)) throw ConfigError("bin width must be positive");
    switch (active_backend()) {
#if defined(HOM_HAVE_AVX2)
    case Backend::avx2: return avx2::bin_index(x.data(), x.size(), lo, width, out.data());
#endif
#if defined(HOM_HAVE_NEON)
    case Backend::neon: return neon::bin_index(x.data(), x.size(), lo, width, out.data());
#endif
    default: return scalar::bin_index(x.data(), x.size(), lo, width, out.data());
    }
}

void coincidence_density(const DensityParams& params, std::span<const double> dt,
                         std::span<double> out)
{
    check_sizes(dt.size(), out.size());
    if (params.omega == 0.0) {
        switch (active_backend()) {
#if defined(HOM_HAVE_AVX2)
        case Backend::avx2:
            return avx2::coincidence_density(params, dt.data(), dt.size(), out.data());
#endif
#if defined(HOM_HAVE_NEON)
        case Backend::neon:
            return neon::coincidence_density(params, dt.data(), dt.size(), out.data());
#endif
        default: break;
        }
    }
    scalar::coincidence_density(params, dt.data(), dt.size(), out.data());
}

}  // namespace hom::kernels
