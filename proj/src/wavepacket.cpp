#include "hom/wavepacket.hpp"

#include <cmath>
#include <string>

#include "hom/error.hpp"
#include "hom/quadrature.hpp"

namespace hom {

Envelope::Envelope(double tau_ns, double t0_ns, double detuning_mhz)
    : tau_(tau_ns), t0_(t0_ns), detuning_(detuning_mhz)
{
    if (!(tau_ns > 0.0) || !std::isfinite(tau_ns)) {
        throw ConfigError("envelope decay time must be positive, got " + std::to_string(tau_ns));
    }
    if (!std::isfinite(t0_ns) || !std::isfinite(detuning_mhz)) {
        throw ConfigError("envelope start and detuning must be finite");
    }
}

std::complex<double> amplitude(const Envelope& env, double t)
{
    if (t < env.t0()) return {0.0, 0.0};
    const double s = t - env.t0();
    const double mag = std::exp(-s / (2.0 * env.tau())) / std::sqrt(env.tau());
    if (env.detuning() == 0.0) return {mag, 0.0};
    return std::polar(mag, -env.angular_detuning() * s);
}

double intensity(const Envelope& env, double t)
{
    if (t < env.t0()) return 0.0;
    return std::exp(-(t - env.t0()) / env.tau()) / env.tau();
}

double sample_emission_time(const Envelope& env, double u)
{
    return env.t0() - env.tau() * std::log1p(-u);
}

double norm(const Envelope& env) { return norm(env, env.t0() + 40.0 * env.tau()); }

double norm(const Envelope& env, double upper)
{
    if (upper <= env.t0()) return 0.0;
    auto density = [&env](double t) { return std::norm(amplitude(env, t)); };
    return integrate(density, env.t0(), upper, 1e-9).value;
}

}  // namespace hom
