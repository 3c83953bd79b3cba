#pragma once

#include <complex>
#include <numbers>

namespace hom {

// Carrier detuning in MHz times this gives the angular frequency in rad/ns.
inline constexpr double kRadPerNsPerMHz = 2.0 * std::numbers::pi * 1e-3;

/// Temporal amplitude of a single photon with a decaying-exponential
/// envelope starting at t0:
///
///     psi(t) = sqrt(1/tau) exp(-(t - t0) / (2 tau)) exp(-i w (t - t0)),  t >= t0
///
/// and zero before t0. Times are in ns, the detuning in MHz.
class Envelope {
public:
    /// Throws ConfigError unless tau is finite and positive.
    Envelope(double tau_ns, double t0_ns = 0.0, double detuning_mhz = 0.0);

    double tau() const noexcept { return tau_; }
    double t0() const noexcept { return t0_; }
    double detuning() const noexcept { return detuning_; }
    double angular_detuning() const noexcept { return detuning_ * kRadPerNsPerMHz; }

    Envelope with_start(double t0_ns) const { return Envelope(tau_, t0_ns, detuning_); }

private:
    double tau_;
    double t0_;
    double detuning_;
};

std::complex<double> amplitude(const Envelope& env, double t);

// |amplitude|^2, the emission-time density.
double intensity(const Envelope& env, double t);

/// Inverse-CDF draw from |psi|^2. Requires 0 <= u < 1.
double sample_emission_time(const Envelope& env, double u);

/// Integral of |psi|^2 over [t0, t0 + 40 tau] by adaptive quadrature.
double norm(const Envelope& env);

// Same integral over [t0, upper].
double norm(const Envelope& env, double upper);

}  // namespace hom
