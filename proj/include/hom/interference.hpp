#pragma once

#include <span>

#include "hom/wavepacket.hpp"

namespace hom {

/// The two photons meeting at the beam splitter. `fwm` is the heralded
/// four-wave-mixing photon, `atom` the photon scattered by the single atom.
/// `xi` in [0, 1] is the amplitude overlap of their remaining degrees of
/// freedom (spatial mode times polarization projection); the two-photon
/// interference term scales with xi^2.
class SourcePair {
public:
    SourcePair(Envelope fwm, Envelope atom, double xi);

    const Envelope& fwm() const noexcept { return fwm_; }
    const Envelope& atom() const noexcept { return atom_; }
    double xi() const noexcept { return xi_; }

    /// Moves the atom photon so that it starts `delta_t` ns before its
    /// current start. The delay is t_f - t_s: positive values make the
    /// atom photon lead the heralded photon.
    SourcePair delayed(double delta_t) const;

private:
    Envelope fwm_;
    Envelope atom_;
    double xi_;
};

/// Coincidence density G(dt) per ns for signed detection-time difference
/// dt = t_a - t_b, in closed form.
double coincidence_density(const SourcePair& pair, double dt);

/// Batch version; uses the vectorized kernel when the photons have equal
/// carrier detuning.
void coincidence_density(const SourcePair& pair, std::span<const double> dt,
                         std::span<double> out);

/// Same quantity by adaptive quadrature over the emission time, with the
/// support truncated 40 max(tau) past the latest start.
double coincidence_density_quadrature(const SourcePair& pair, double dt);

/// Total coincidence probability (the density integrated over all dt) for
/// the pair delayed by `delta_t` (see SourcePair::delayed).
double coincidence_probability(const SourcePair& pair, double delta_t = 0.0);

// Nested-quadrature route of the above.
double coincidence_probability_quadrature(const SourcePair& pair, double delta_t = 0.0);

/// 4 tau_s tau_f / (tau_s + tau_f)^2. Throws ConfigError for tau <= 0.
double visibility_closed_form(double tau_s, double tau_f);

/// P_par / P_perp as a function of the delay t_f - t_s:
/// 1 - V exp(-delta_t / tau_s) for delta_t >= 0 and 1 - V exp(delta_t / tau_f)
/// otherwise.
double dip_ratio(double delta_t, double tau_s, double tau_f);

struct OutcomeProbs {
    double coincidence = 0.0;  // one photon in each output port
    double bunch_a = 0.0;      // both photons at detector A
    double bunch_b = 0.0;
};

/// Beam-splitter outcome probabilities given that the heralded photon was
/// emitted at t_fwm and the atom photon at t_atom. Throws std::domain_error
/// if both orderings of the pair have zero amplitude.
OutcomeProbs conditional_outcome_probs(const SourcePair& pair, double t_fwm, double t_atom);

}  // namespace hom
