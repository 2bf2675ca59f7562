#pragma once

// Tilted CHSH certificate for one measurement step.
//
//   I = beta <B0> + <A0 B0> + <A0 B1> + <A1 B0> - <A1 B1>
//   local bound 2 + beta, quantum bound sqrt(2 (4 + beta^2))
//   G <= 1/2 + sqrt(I_max^2 - I^2) / (2 (2 - beta)),  H_min = -log2 G

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "seqweak/errors.hpp"
#include "seqweak/protocol.hpp"
#include "seqweak/qcore.hpp"

namespace seqweak {

// Results with beta above this are reported but flagged.
inline constexpr double kLowConfidenceBeta = 1.99;

template <typename Real>
Real beta_of(Real theta) {
  theta = detail::checked_angle<Real>(static_cast<double>(theta), "Schmidt angle");
  const Real s = std::sin(2 * theta);
  return 2 * std::cos(2 * theta) / std::sqrt(1 + s * s);
}

template <typename Real>
Real mu_of(Real theta) {
  return std::atan(std::sin(2 * theta));
}

template <typename Real>
Real quantum_bound(Real beta) {
  return std::sqrt(2 * (4 + beta * beta));
}

template <typename Real>
Real local_bound(Real beta) {
  return 2 + beta;
}

// Gap below the quantum bound that is indistinguishable from rounding in I.
template <typename Real>
Real saturation_tolerance(Real i_max) {
  return 32 * std::numeric_limits<Real>::epsilon() * i_max;
}

template <typename Real>
struct Observables {
  QubitOperator<Real> a0;
  QubitOperator<Real> a1;
  QubitOperator<Real> b0;
  QubitOperator<Real> b1;  // effective: cos(2 xi) sigma_x
};

template <typename Real>
Observables<Real> observables(Real theta, Real xi) {
  theta = detail::checked_angle<Real>(static_cast<double>(theta), "Schmidt angle");
  xi = detail::checked_angle<Real>(static_cast<double>(xi), "measurement strength");
  const Real mu = mu_of(theta);
  const auto z = sigma_z<Real>();
  const auto x = sigma_x<Real>();
  return {std::cos(mu) * z + std::sin(mu) * x, std::cos(mu) * z - std::sin(mu) * x, z,
          std::cos(2 * xi) * x};
}

template <typename Real>
struct Correlators {
  Real b0{};
  Real a0b0{};
  Real a0b1{};
  Real a1b0{};
  Real a1b1{};
};

template <typename Real>
struct BellCertificate {
  Real beta{};
  Correlators<Real> correlators;
  Real i_value{};
  Real i_max{};
  Real g_max{};
  Real h_min{};
  bool overshoot = false;       // I estimated above the quantum bound
  bool uncertifiable = false;   // beta = 2, nothing to certify
  bool low_confidence = false;  // beta > 1.99
};

// Upper bound on the guessing probability, capped at 1. Values of I within
// rounding of I_max count as saturating; I_max^2 - I^2 is evaluated in the
// factored form (I_max - I)(I_max + I).
template <typename Real>
Real guess_bound(Real i_value, Real beta) {
  if (!(beta < Real(2))) {
    throw UncertifiableError("guessing bound undefined for beta >= 2 (separable reference state)");
  }
  if (beta < Real(0)) throw DomainError("beta must be non-negative");
  const Real i_max = quantum_bound(beta);
  Real gap = i_max - std::min(i_value, i_max);
  if (gap <= saturation_tolerance(i_max)) gap = 0;
  const Real i_clamped = i_max - gap;
  const Real g = Real(0.5) + std::sqrt(std::max(Real(0), gap * (i_max + i_clamped))) / (2 * (2 - beta));
  return std::min(Real(1), g);
}

template <typename Real>
Real bell_combination(Real beta, const Correlators<Real>& c) {
  return beta * c.b0 + c.a0b0 + c.a0b1 + c.a1b0 - c.a1b1;
}

// Certificate from given correlators (exact or estimated).
template <typename Real>
BellCertificate<Real> certify(Real beta, const Correlators<Real>& corr) {
  BellCertificate<Real> cert;
  cert.beta = beta;
  cert.correlators = corr;
  cert.i_value = bell_combination(beta, corr);
  cert.i_max = quantum_bound(beta);
  cert.overshoot = cert.i_value > cert.i_max + saturation_tolerance(cert.i_max);
  cert.low_confidence = beta > Real(kLowConfidenceBeta);
  cert.uncertifiable = !(beta < Real(2));

  if (cert.uncertifiable || cert.i_value <= local_bound(beta)) {
    cert.g_max = 1;
    cert.h_min = 0;
    return cert;
  }
  cert.g_max = guess_bound(cert.i_value, beta);
  cert.h_min = std::max(Real(0), -std::log2(cert.g_max));
  return cert;
}

template <typename Real>
Correlators<Real> correlators(const TwoQubitState<Real>& state, const Observables<Real>& obs) {
  const auto id = identity2<Real>();
  return {expect(state, tensor(id, obs.b0)), expect(state, tensor(obs.a0, obs.b0)),
          expect(state, tensor(obs.a0, obs.b1)), expect(state, tensor(obs.a1, obs.b0)),
          expect(state, tensor(obs.a1, obs.b1))};
}

// Certificate of step k evaluated on the step-k branch state, with the
// ideal Schmidt angle theta_k and the step's strength xi_k.
template <typename Real>
BellCertificate<Real> bell_value(const TwoQubitState<Real>& state, Real theta, Real xi) {
  return certify(beta_of(theta), correlators(state, observables(theta, xi)));
}

}  // namespace seqweak
