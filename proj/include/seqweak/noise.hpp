#pragma once

// Imperfect source model: a mixture of the target pure state, white noise
// (weight p) and a dephased copy of the target (weight c).

#include <algorithm>
#include <cmath>
#include <string>

#include "seqweak/errors.hpp"
#include "seqweak/qcore.hpp"

namespace seqweak {

struct NoiseParams {
  double p = 0.0;  // depolarization weight
  double c = 0.0;  // decoherence weight

  void validate() const {
    if (!(p >= 0.0) || !(c >= 0.0) || p + c > 1.0 + tolerance::kConstruction) {
      throw DomainError("noise parameters need p >= 0, c >= 0, p + c <= 1 (got p=" +
                        std::to_string(p) + ", c=" + std::to_string(c) + ")");
    }
  }
};

struct Visibilities {
  double v_z = 1.0;
  double v_x = 1.0;
};

// (1-p-c)|psi><psi| + p 1/4 + c (cos^2 t |00><00| + sin^2 t |11><11|),
// with psi = cos t|00> + sin t|11>. At t = pi/4 the last term is
// (|00><00| + |11><11|)/2.
template <typename Real>
TwoQubitState<Real> make_state(const NoiseParams& params, Real theta1) {
  params.validate();
  if (!(theta1 >= Real(0)) || theta1 > kQuarterPi<Real> + Real(tolerance::kConstruction)) {
    throw DomainError("theta1 must lie in [0, pi/4]");
  }
  const Real p = params.p;
  const Real c = params.c;
  const Real ct = std::cos(theta1);
  const Real st = std::sin(theta1);

  TwoQubitOperator<Real> rho = TwoQubitOperator<Real>::Identity() * (p / 4);
  const Real w = 1 - p - c;
  rho(0, 0) += w * ct * ct + c * ct * ct;
  rho(3, 3) += w * st * st + c * st * st;
  rho(0, 3) += w * ct * st;
  rho(3, 0) += w * ct * st;
  return TwoQubitState<Real>::assume_valid(rho);
}

template <typename Real>
Visibilities visibilities_of(const TwoQubitState<Real>& state) {
  const auto z = sigma_z<Real>();
  const auto x = sigma_x<Real>();
  return {static_cast<double>(expect(state, tensor(z, z))),
          static_cast<double>(expect(state, tensor(x, x)))};
}

// Inverts V_Z = 1 - p, V_X = 1 - p - c. Valid for a maximally entangled
// target (theta1 = pi/4); other targets change V_X and are not invertible
// this way.
inline NoiseParams params_from_visibilities(const Visibilities& vis) {
  if (!(vis.v_z <= 1.0) || !(vis.v_x >= -1.0)) {
    throw DomainError("visibilities must lie in [-1, 1]");
  }
  // Visibilities computed from a state carry rounding; allow that much slack.
  if (vis.v_x > vis.v_z + tolerance::kConstruction) {
    throw DomainError("V_X > V_Z cannot be represented by the noise model");
  }
  NoiseParams out{std::max(0.0, 1.0 - vis.v_z), std::max(0.0, vis.v_z - vis.v_x)};
  if (out.p + out.c > 1.0 + tolerance::kConstruction) {
    throw DomainError("V_X < 0 cannot be represented by the noise model");
  }
  return out;
}

}  // namespace seqweak
