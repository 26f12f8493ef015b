#pragma once

// One qubit resonant with a leaky cavity, one excitation, no qubit loss.
// The sector-1 amplitudes obey
//   c_q'  = -i g c_ph
//   c_ph' = -i g c_q - (kappa / 2) c_ph
// so with c_q(0) = 1, c_ph(0) = 0 and W = sqrt((kappa/4)^2 - g^2) (complex
// below critical damping):
//   c_q(t)  = e^{-kappa t / 4} (cosh W t + kappa / (4 W) sinh W t)
//   c_ph(t) = -i g e^{-kappa t / 4} sinh(W t) / W

#include <cmath>
#include <complex>

namespace tcsim::analytic {

struct SingleExcitation {
    double n_q = 0.0;
    double n_ph = 0.0;
};

inline SingleExcitation single_excitation(double kappa, double g, double t) {
    using c = std::complex<double>;
    const c w = std::sqrt(c(kappa * kappa / 16.0 - g * g, 0.0));
    const double decay = std::exp(-kappa * t / 4.0);
    c sinh_over_w;
    c cosh_wt;
    if (std::abs(w * t) < 1e-6) {
        // series to second order keeps the critically damped case finite
        sinh_over_w = t * (1.0 + (w * t) * (w * t) / 6.0);
        cosh_wt = 1.0 + (w * t) * (w * t) / 2.0;
    } else {
        sinh_over_w = std::sinh(w * t) / w;
        cosh_wt = std::cosh(w * t);
    }
    const c cq = decay * (cosh_wt + (kappa / 4.0) * sinh_over_w);
    const c cph = c(0.0, -g) * decay * sinh_over_w;
    return {std::norm(cq), std::norm(cph)};
}

}  // namespace tcsim::analytic
