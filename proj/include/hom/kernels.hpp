#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and
// SIMD variants (AVX2 on x86-64, NEON on AArch64) chosen once at runtime
// from the CPU features. HOM_KERNELS=scalar|avx2|neon in the environment
// overrides the choice.

#include <cstdint>
#include <span>
#include <string_view>

#include "hom/density_params.hpp"

namespace hom::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view name(Backend backend);

// Compiled in and supported by this CPU.
bool available(Backend backend);

Backend active_backend();

/// Forces a backend for the rest of the process. Throws ConfigError when
/// it is not available.
void select_backend(Backend backend);

/// ticks[i] = floor(t_ns[i] * 1000 / resolution_ps). Every time must be
/// non-negative and map below 2^52 ticks (ConfigError otherwise).
/// Results are identical on every backend.
void quantize(std::span<const double> t_ns, double resolution_ps, std::span<std::int64_t> ticks);

/// out[i] = floor((x[i] - lo) / width), clamped to [-1, 2^30]. Results are
/// identical on every backend.
void bin_index(std::span<const double> x, double lo, double width, std::span<std::int64_t> out);


/// G(dt) for every dt. The SIMD variants handle omega == 0; other values
/// run the scalar reference.
void coincidence_density(const DensityParams& params, std::span<const double> dt,
                         std::span<double> out);

}  // namespace hom::kernels
