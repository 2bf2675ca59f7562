#pragma once

// Dense linear algebra for one- and two-qubit objects.
//
// Basis order for two qubits is |00>, |01>, |10>, |11> with Alice's qubit
// first, so an amplitude vector reads as a 2x2 matrix with rows indexed by
// Alice and columns by Bob. Everything is templated on the real scalar so the
// same code runs in double and long double.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "seqweak/errors.hpp"

namespace seqweak {

template <typename Real>
using Complex = std::complex<Real>;
template <typename Real>
using QubitOperator = Eigen::Matrix<Complex<Real>, 2, 2>;
template <typename Real>
using TwoQubitOperator = Eigen::Matrix<Complex<Real>, 4, 4>;
template <typename Real>
using TwoQubitKet = Eigen::Matrix<Complex<Real>, 4, 1>;

namespace tolerance {
inline constexpr double kConstruction = 1e-12;
inline constexpr double kDerived = 1e-10;
}  // namespace tolerance

template <typename Real>
inline constexpr Real kQuarterPi = std::numbers::pi_v<Real> / 4;

template <typename Real>
QubitOperator<Real> identity2() {
  return QubitOperator<Real>::Identity();
}

template <typename Real>
QubitOperator<Real> sigma_x() {
  QubitOperator<Real> m;
  m << 0, 1, 1, 0;
  return m;
}

template <typename Real>
QubitOperator<Real> sigma_z() {
  QubitOperator<Real> m;
  m << 1, 0, 0, -1;
  return m;
}

template <typename Derived>
double max_abs_entry(const Eigen::MatrixBase<Derived>& m) {
  return static_cast<double>(m.cwiseAbs().maxCoeff());
}

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = tolerance::kConstruction) {
  return max_abs_entry(m - m.adjoint()) <= tol;
}

template <typename Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& m, double tol = tolerance::kConstruction) {
  using Plain = typename Derived::PlainObject;
  return max_abs_entry(m.adjoint() * m - Plain::Identity(m.rows(), m.cols())) <= tol;
}

// Kronecker product of two single-qubit operators, Alice's factor first.
template <typename DA, typename DB>
Eigen::Matrix<typename DA::Scalar, 4, 4> tensor(const Eigen::MatrixBase<DA>& alice,
                                                const Eigen::MatrixBase<DB>& bob) {
  static_assert(DA::RowsAtCompileTime == 2 && DA::ColsAtCompileTime == 2);
  static_assert(DB::RowsAtCompileTime == 2 && DB::ColsAtCompileTime == 2);
  Eigen::Matrix<typename DA::Scalar, 4, 4> out;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out.template block<2, 2>(2 * i, 2 * j) = alice(i, j) * bob;
    }
  }
  return out;
}

template <typename Real>
class PureTwoQubit {
 public:
  using Ket = TwoQubitKet<Real>;

  explicit PureTwoQubit(const Ket& amplitudes) : amplitudes_(amplitudes) {
    const double err = std::abs(static_cast<double>(amplitudes_.norm()) - 1.0);
    if (err > tolerance::kConstruction) {
      throw DomainError("pure state is not normalized (|norm - 1| = " + std::to_string(err) + ")");
    }
  }

  static PureTwoQubit normalized(const Ket& v) {
    const Real n = v.norm();
    if (!(n > Real(0))) throw DomainError("cannot normalize the zero vector");
    return PureTwoQubit(v / n);
  }

  // cos(theta)|00> + sin(theta)|11>
  static PureTwoQubit schmidt_diagonal(Real theta) {
    Ket v = Ket::Zero();
    v(0) = std::cos(theta);
    v(3) = std::sin(theta);
    return PureTwoQubit(v);
  }

  const Ket& amplitudes() const { return amplitudes_; }

 private:
  Ket amplitudes_;
};

template <typename Real>
class TwoQubitState {
 public:
  using Matrix = TwoQubitOperator<Real>;

  // Validates hermiticity and unit trace (1e-12) and positivity (eigenvalues >= -1e-10).
  explicit TwoQubitState(const Matrix& rho) : rho_(rho) { validate(rho_); }

  // For results of operations that preserve validity by construction.
  static TwoQubitState assume_valid(const Matrix& rho) { return TwoQubitState(rho, Unchecked{}); }

  static TwoQubitState from_pure(const PureTwoQubit<Real>& psi) {
    const auto& a = psi.amplitudes();
    return TwoQubitState(a * a.adjoint(), Unchecked{});
  }

  static TwoQubitState maximally_mixed() {
    return TwoQubitState(Matrix::Identity() / Real(4), Unchecked{});
  }

  const Matrix& rho() const { return rho_; }

  Real purity() const { return (rho_ * rho_).trace().real(); }

  static void validate(const Matrix& rho) {
    if (!is_hermitian(rho, tolerance::kConstruction)) {
      throw DomainError("density matrix is not Hermitian");
    }
    const double trace_err = std::abs(static_cast<double>(rho.trace().real()) - 1.0);
    if (trace_err > tolerance::kConstruction) {
      throw DomainError("density matrix trace differs from 1 by " + std::to_string(trace_err));
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(rho, Eigen::EigenvaluesOnly);
    if (static_cast<double>(eig.eigenvalues().minCoeff()) < -tolerance::kDerived) {
      throw DomainError("density matrix is not positive semidefinite");
    }
  }

 private:
  struct Unchecked {};
  TwoQubitState(const Matrix& rho, Unchecked) : rho_(rho) {}

  Matrix rho_;
};

// U rho U^dagger. U must be unitary; validity of the state carries over.
template <typename Real>
TwoQubitState<Real> sandwich(const TwoQubitOperator<Real>& u, const TwoQubitState<Real>& state) {
  return TwoQubitState<Real>::assume_valid(u * state.rho() * u.adjoint());
}

// tr(rho * obs) for a Hermitian observable.
template <typename Real, typename Derived>
Real expect(const TwoQubitState<Real>& state, const Eigen::MatrixBase<Derived>& obs) {
  if (!is_hermitian(obs, tolerance::kDerived)) {
    throw DomainError("expectation requested for a non-Hermitian operator");
  }
  const Complex<Real> tr = state.rho().cwiseProduct(obs.transpose()).sum();
  if (std::abs(static_cast<double>(tr.imag())) >= tolerance::kDerived) {
    throw DomainError("expectation value has a non-negligible imaginary part");
  }
  return tr.real();
}

template <typename Real>
struct SchmidtForm {
  Real theta{};  // in [0, pi/4]
  QubitOperator<Real> u_alice;
  QubitOperator<Real> u_bob;

  // (u_alice x u_bob)(cos theta |00> + sin theta |11>)
  TwoQubitKet<Real> reconstruct() const {
    return tensor(u_alice, u_bob) * PureTwoQubit<Real>::schmidt_diagonal(theta).amplitudes();
  }
};

// Schmidt decomposition through the SVD of the 2x2 amplitude matrix.
// Singular values come out descending, so theta = atan2(s1, s0) lies in
// [0, pi/4]. u_alice is fixed to unit determinant with a compensating column
// phase on u_bob (exact reconstruction); u_bob is then brought to unit
// determinant by a global phase, so the reconstruction holds up to that phase.
template <typename Real>
SchmidtForm<Real> schmidt(const PureTwoQubit<Real>& psi) {
  using Op = QubitOperator<Real>;
  const auto& a = psi.amplitudes();
  Op m;
  m << a(0), a(1), a(2), a(3);

  const Eigen::JacobiSVD<Op> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();

  SchmidtForm<Real> out;
  out.theta = std::atan2(s(1), s(0));
  out.u_alice = svd.matrixU();
  out.u_bob = svd.matrixV().conjugate();

  const Complex<Real> det_a = out.u_alice.determinant();
  const Complex<Real> phase_a = det_a / std::abs(det_a);
  out.u_alice.col(1) *= std::conj(phase_a);
  out.u_bob.col(1) *= phase_a;

  const Complex<Real> det_b = out.u_bob.determinant();
  if (std::abs(det_b - Complex<Real>(1)) > Real(0)) {
    out.u_bob *= std::polar(Real(1), -std::arg(det_b) / 2);
  }
  return out;
}

// min over global phases phi of |a - e^{i phi} b|.
template <typename Real>
Real distance_up_to_phase(const TwoQubitKet<Real>& a, const TwoQubitKet<Real>& b) {
  const Complex<Real> overlap = b.dot(a);
  const Real mag = std::abs(overlap);
  const Complex<Real> phase = mag > Real(0) ? overlap / mag : Complex<Real>(1);
  return (a - phase * b).norm();
}

}  // namespace seqweak
