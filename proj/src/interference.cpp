#include "hom/interference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hom/error.hpp"
#include "hom/kernels.hpp"
#include "hom/quadrature.hpp"
#include "kernels/backends.hpp"

namespace hom {
namespace {

constexpr double kSupportTaus = 40.0;
constexpr double kDensityTol = 1e-10;

void require_positive_tau(double tau_s, double tau_f)
{
    if (!(tau_s > 0.0) || !(tau_f > 0.0)) {
        throw ConfigError("coherence times must be positive (tau_s=" + std::to_string(tau_s) +
                          ", tau_f=" + std::to_string(tau_f) + ")");
    }
}

// Integrating |psi_f(t) psi_s(t + dt)|^2 over t gives
// exp(-c/tau_s)/(tau_f + tau_s) for c = dt - shift >= 0 and
// exp(c/tau_f)/(tau_f + tau_s) below. The interference term
// psi_f(t) psi_s(t+dt) conj(psi_f(t+dt) psi_s(t)) has a t-independent phase
// (omega dt) and integrates to the overlap factor times exp(-half_rate |dt|).
kernels::DensityParams make_density_params(const SourcePair& pair)
{
    const double tau_f = pair.fwm().tau();
    const double tau_s = pair.atom().tau();

    kernels::DensityParams p;
    p.inv_tau_f = 1.0 / tau_f;
    p.inv_tau_s = 1.0 / tau_s;
    p.shift = pair.atom().t0() - pair.fwm().t0();
    p.norm = 1.0 / (tau_f + tau_s);
    p.half_rate = 0.5 * (p.inv_tau_f + p.inv_tau_s);
    // The overlap of the two starts equals I(-shift); evaluated exactly as
    // the kernel evaluates I so that G(0) cancels to 0 for xi = 1.
    const double c = -p.shift;
    const double overlap = c >= 0.0 ? std::exp(-c * p.inv_tau_s) : std::exp(c * p.inv_tau_f);
    p.cross = pair.xi() * pair.xi() * overlap;
    p.omega = pair.atom().angular_detuning() - pair.fwm().angular_detuning();
    return p;
}

}  // namespace

SourcePair::SourcePair(Envelope fwm, Envelope atom, double xi)
    : fwm_(fwm), atom_(atom), xi_(xi)
{
    if (!(xi >= 0.0 && xi <= 1.0)) {
        throw ConfigError("distinguishability xi must lie in [0, 1], got " + std::to_string(xi));
    }
}

SourcePair SourcePair::delayed(double delta_t) const
{
    return SourcePair(fwm_, atom_.with_start(atom_.t0() - delta_t), xi_);
}

double coincidence_density(const SourcePair& pair, double dt)
{
    // single points always take the scalar reference path
    double out = 0.0;
    kernels::scalar::coincidence_density(make_density_params(pair), &dt, 1, &out);
    return out;
}

void coincidence_density(const SourcePair& pair, std::span<const double> dt, std::span<double> out)
{
    kernels::coincidence_density(make_density_params(pair), dt, out);
}

double coincidence_density_quadrature(const SourcePair& pair, double dt)
{
    const Envelope& f = pair.fwm();
    const Envelope& s = pair.atom();
    const double xi2 = pair.xi() * pair.xi();
    auto integrand = [&](double t) {
        const auto a = amplitude(f, t) * amplitude(s, t + dt);
        const auto b = amplitude(f, t + dt) * amplitude(s, t);
        return 0.25 * (std::norm(a) + std::norm(b) - 2.0 * xi2 * std::real(a * std::conj(b)));
    };
    const double lower_a = std::max(f.t0(), s.t0() - dt);
    const double lower_b = std::max(s.t0(), f.t0() - dt);
    // every term decays at 1/tau_f + 1/tau_s; split into geometric panels
    // so no single panel hides the peak from the adaptive rule
    const double decay = f.tau() * s.tau() / (f.tau() + s.tau());
    const double start = std::max(lower_a, lower_b);
    const double first = std::min(lower_a, lower_b);
    std::vector<double> points{first, start};
    for (double k = 0.25; k <= kSupportTaus; k *= 2.0) {
        points.push_back(start + k * decay);
        if (first + k * decay < start) points.push_back(first + k * decay);
    }
    points.push_back(start + kSupportTaus * decay);
    return integrate_piecewise(integrand, std::move(points), kDensityTol).value;
}

double coincidence_probability(const SourcePair& pair, double delta_t)
{
    const auto p = make_density_params(pair.delayed(delta_t));
    const double h = p.half_rate;
    return 0.5 - p.cross * p.norm * h / (h * h + p.omega * p.omega);
}

double coincidence_probability_quadrature(const SourcePair& pair, double delta_t)
{
    const SourcePair moved = pair.delayed(delta_t);
    const double shift = moved.atom().t0() - moved.fwm().t0();
    const double span =
        std::abs(shift) + kSupportTaus * std::max(moved.fwm().tau(), moved.atom().tau());
    auto density = [&moved](double dt) { return coincidence_density_quadrature(moved, dt); };
    return integrate_piecewise(density, {-span, -shift, 0.0, shift, span}, 1e-9).value;
}

double visibility_closed_form(double tau_s, double tau_f)
{
    require_positive_tau(tau_s, tau_f);
    const double sum = tau_s + tau_f;
    return 4.0 * tau_s * tau_f / (sum * sum);
}

double dip_ratio(double delta_t, double tau_s, double tau_f)
{
    const double v = visibility_closed_form(tau_s, tau_f);
    const double decay = delta_t >= 0.0 ? std::exp(-delta_t / tau_s) : std::exp(delta_t / tau_f);
    return 1.0 - v * decay;
}

OutcomeProbs conditional_outcome_probs(const SourcePair& pair, double t_fwm, double t_atom)
{
    const auto a = amplitude(pair.fwm(), t_fwm) * amplitude(pair.atom(), t_atom);
    const auto b = amplitude(pair.fwm(), t_atom) * amplitude(pair.atom(), t_fwm);
    const double d = std::norm(a) + std::norm(b);
    if (!(d > 0.0)) {
        throw std::domain_error("emission times outside both envelopes (t_fwm=" +
                                std::to_string(t_fwm) + ", t_atom=" + std::to_string(t_atom) + ")");
    }
    const double x = 2.0 * pair.xi() * pair.xi() * std::real(a * std::conj(b));
    OutcomeProbs r;
    r.coincidence = (d - x) / (2.0 * d);
    r.bunch_a = (d + x) / (4.0 * d);
    r.bunch_b = r.bunch_a;
    return r;
}

}  // namespace hom
