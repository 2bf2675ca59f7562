#pragma once

// Sequential weak measurements on Bob's qubit.
//
// Each step measures sigma_x on Bob's side with Kraus operators
//   K_+/- = 1/2 [(cos xi + sin xi) 1 +/- (cos xi - sin xi) sigma_x],
// then both parties undo the local unitaries that the same measurement would
// produce on the ideal pure state, which returns the ideal state to the
// Schmidt-diagonal form cos t|00> + sin t|11>. The unitaries always come from
// the ideal protocol; the source noise only enters through the state.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "seqweak/errors.hpp"
#include "seqweak/noise.hpp"
#include "seqweak/qcore.hpp"

namespace seqweak {

enum class Outcome : int { Plus = 1, Minus = -1 };

inline constexpr double kDegenerateBranchProbability = 1e-14;

struct History {
  std::vector<Outcome> outcomes;

  std::size_t size() const { return outcomes.size(); }

  History then(Outcome y) const {
    History h = *this;
    h.outcomes.push_back(y);
    return h;
  }

  // "+-+" style, empty for the first step.
  std::string str() const {
    std::string s;
    s.reserve(outcomes.size());
    for (Outcome y : outcomes) s.push_back(y == Outcome::Plus ? '+' : '-');
    return s;
  }

  static History parse(std::string_view text) {
    History h;
    for (char ch : text) {
      if (ch == '+') {
        h.outcomes.push_back(Outcome::Plus);
      } else if (ch == '-') {
        h.outcomes.push_back(Outcome::Minus);
      } else {
        throw DomainError("history may contain only '+' and '-' (got '" + std::string(text) + "')");
      }
    }
    return h;
  }

  // Lexicographic with '+' before '-', matching the tree's branch order.
  std::strong_ordering operator<=>(const History& other) const {
    return str() <=> other.str();
  }
  bool operator==(const History&) const = default;
};

namespace detail {

template <typename Real>
Real checked_angle(double value, const char* name) {
  constexpr double slack = tolerance::kConstruction;
  const double quarter_pi = std::numbers::pi / 4;
  if (!(value >= 0.0) || value > quarter_pi + slack) {
    throw DomainError(std::string(name) + " must lie in [0, pi/4] (got " + std::to_string(value) + ")");
  }
  return std::min(static_cast<Real>(value), kQuarterPi<Real>);
}

}  // namespace detail

struct ProtocolConfig {
  double theta1 = std::numbers::pi / 4;
  std::vector<double> strengths;  // xi_k per step; 0 is a projective step
  NoiseParams noise;

  void validate() const {
    detail::checked_angle<double>(theta1, "theta1");
    for (double xi : strengths) detail::checked_angle<double>(xi, "measurement strength");
    noise.validate();
  }
};

template <typename Real>
struct KrausPair {
  QubitOperator<Real> plus;
  QubitOperator<Real> minus;

  const QubitOperator<Real>& operator[](Outcome y) const { return y == Outcome::Plus ? plus : minus; }
};

template <typename Real>
KrausPair<Real> kraus_pair(Real xi) {
  xi = detail::checked_angle<Real>(static_cast<double>(xi), "measurement strength");
  const Real even = (std::cos(xi) + std::sin(xi)) / 2;
  const Real odd = (std::cos(xi) - std::sin(xi)) / 2;
  const auto id = identity2<Real>();
  const auto x = sigma_x<Real>();
  return {even * id + odd * x, even * id - odd * x};
}

template <typename Real>
struct BranchResult {
  Real probability;
  TwoQubitState<Real> state;
};

// Bob's weak measurement with a given outcome; returns the outcome
// probability and the normalized post-measurement state.
template <typename Real>
BranchResult<Real> weak_branch(const TwoQubitState<Real>& state, Real xi, Outcome outcome) {
  const auto k = tensor(identity2<Real>(), kraus_pair(xi)[outcome]);
  TwoQubitOperator<Real> unnormalized = k * state.rho() * k.adjoint();
  const Real prob = unnormalized.trace().real();
  if (!(prob >= Real(kDegenerateBranchProbability))) {
    throw DegenerateBranchError("outcome probability " + std::to_string(static_cast<double>(prob)) +
                                " is too small to condition on");
  }
  unnormalized /= prob;
  return {prob, TwoQubitState<Real>::assume_valid(unnormalized)};
}

template <typename Real>
struct Rebalance {
  QubitOperator<Real> u_alice;
  QubitOperator<Real> u_bob;
  Real next_theta;
  bool separable;  // next_theta == 0: no later step can certify anything
};

// Local unitaries mapping the ideal post-measurement state back to
// Schmidt-diagonal form, via SVD of the explicitly measured ideal state.
template <typename Real>
Rebalance<Real> rebalance_unitaries(Real ideal_theta, Real xi, Outcome outcome) {
  ideal_theta = detail::checked_angle<Real>(static_cast<double>(ideal_theta), "Schmidt angle");
  const auto k = tensor(identity2<Real>(), kraus_pair(xi)[outcome]);
  const TwoQubitKet<Real> measured = k * PureTwoQubit<Real>::schmidt_diagonal(ideal_theta).amplitudes();
  const auto form = schmidt(PureTwoQubit<Real>::normalized(measured));
  return {form.u_alice, form.u_bob, form.theta, form.theta == Real(0)};
}

// Closed form of the Schmidt angle recursion: sin 2t' = sin 2t sin 2xi.
template <typename Real>
Real next_schmidt_angle(Real theta, Real xi) {
  using std::asin;
  using std::sin;
  return asin(std::min(Real(1), sin(2 * theta) * sin(2 * xi))) / 2;
}

template <typename Real>
struct BranchNode {
  History history;
  Real probability;
  TwoQubitState<Real> state;  // after rebalancing
  Real ideal_theta;
};

template <typename Real>
using BranchTree = std::vector<std::vector<BranchNode<Real>>>;

template <typename Real>
BranchNode<Real> root_node(const ProtocolConfig& config) {
  config.validate();
  const Real theta1 = detail::checked_angle<Real>(config.theta1, "theta1");
  return {History{}, Real(1), make_state<Real>(config.noise, theta1), theta1};
}

template <typename Real>
BranchNode<Real> child_node(const BranchNode<Real>& parent, Real xi, Outcome outcome) {
  auto branch = weak_branch(parent.state, xi, outcome);
  const auto reb = rebalance_unitaries(parent.ideal_theta, xi, outcome);
  const TwoQubitOperator<Real> undo = tensor(reb.u_alice, reb.u_bob).adjoint();
  return {parent.history.then(outcome), parent.probability * branch.probability,
          sandwich(undo, branch.state), reb.next_theta};
}

// Full branch tree: level d holds the 2^d nodes after d measurement steps,
// ordered so the children of node i are 2i (+) and 2i+1 (-). `max_depth`
// truncates the evolution.
template <typename Real>
BranchTree<Real> evolve_tree(const ProtocolConfig& config,
                             std::size_t max_depth = std::numeric_limits<std::size_t>::max()) {
  const std::size_t depth = std::min(max_depth, config.strengths.size());
  BranchTree<Real> tree;
  tree.reserve(depth + 1);
  tree.push_back({root_node<Real>(config)});
  for (std::size_t d = 0; d < depth; ++d) {
    const Real xi = static_cast<Real>(config.strengths[d]);
    std::vector<BranchNode<Real>> next;
    next.reserve(2 * tree.back().size());
    for (const auto& node : tree.back()) {
      next.push_back(child_node(node, xi, Outcome::Plus));
      next.push_back(child_node(node, xi, Outcome::Minus));
    }
    tree.push_back(std::move(next));
  }
  return tree;
}

// The single branch selected by `history`.
template <typename Real>
BranchNode<Real> follow_history(const ProtocolConfig& config, const History& history) {
  if (history.size() > config.strengths.size()) {
    throw DomainError("history '" + history.str() + "' is longer than the measurement sequence");
  }
  BranchNode<Real> node = root_node<Real>(config);
  for (std::size_t d = 0; d < history.size(); ++d) {
    node = child_node(node, static_cast<Real>(config.strengths[d]), history.outcomes[d]);
  }
  return node;
}

// Ideal Schmidt angles theta_1 .. theta_{n+1} from the closed-form recursion.
template <typename Real>
std::vector<Real> ideal_thetas(const ProtocolConfig& config) {
  config.validate();
  std::vector<Real> out{detail::checked_angle<Real>(config.theta1, "theta1")};
  for (double xi : config.strengths) out.push_back(next_schmidt_angle(out.back(), static_cast<Real>(xi)));
  return out;
}

}  // namespace seqweak
