#pragma once

namespace hom::kernels {

/// Closed-form parameters of the two-photon coincidence density
///
///   G(dt) = norm/4 * [I(dt - shift) + I(-dt - shift) - 2 cross exp(-half_rate |dt|) cos(omega dt)]
///
/// with I(c) = exp(-c / tau_s) for c >= 0 and exp(c / tau_f) for c < 0.
struct DensityParams {
    double inv_tau_f = 1.0;
    double inv_tau_s = 1.0;
    double shift = 0.0;      // atom photon start minus fwm photon start, ns
    double norm = 0.5;       // 1 / (tau_f + tau_s)
    double half_rate = 1.0;  // (1/tau_f + 1/tau_s) / 2
    double cross = 0.0;      // xi^2 times the overlap factor of the two starts
    double omega = 0.0;      // relative carrier angular frequency, rad/ns
};

}  // namespace hom::kernels
