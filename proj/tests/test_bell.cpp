#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "seqweak/bell.hpp"
#include "seqweak/noise.hpp"
#include "seqweak/protocol.hpp"
#include "test_support.hpp"

namespace seqweak {
namespace {

using namespace seqweak::testing;

constexpr double kQuarter = std::numbers::pi / 4;

TEST(Beta, Examples) {
  EXPECT_NEAR(beta_of(kQuarter), 0.0, 1e-15);
  EXPECT_NEAR(beta_of(0.0), 2.0, 1e-15);
  EXPECT_NEAR(beta_of(0.4), 1.1322205848606806, 1e-14);
  EXPECT_NEAR(quantum_bound(0.0), std::sqrt(8.0), 1e-15);
  EXPECT_NEAR(quantum_bound(2.0), 4.0, 1e-15);
}

TEST(Beta, DecreasesWithTheta) {
  double prev = beta_of(0.0);
  for (int i = 1; i <= 200; ++i) {
    const double b = beta_of(kQuarter * i / 200.0);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(Observables, AreDichotomicAndB1IsUnsharp) {
  const auto obs = observables(0.3, 0.2);
  for (const Op2* a : {&obs.a0, &obs.a1, &obs.b0}) {
    EXPECT_TRUE(is_hermitian(*a));
    EXPECT_LT(max_abs_entry(*a * *a - identity2<double>()), 1e-15);
  }
  EXPECT_LT(max_abs_entry(obs.b1 - std::cos(0.4) * sigma_x<double>()), 1e-15);
  const double mu = std::atan(std::sin(0.6));
  EXPECT_LT(max_abs_entry(obs.a0 - (std::cos(mu) * sigma_z<double>() + std::sin(mu) * sigma_x<double>())), 1e-15);
}

TEST(BellValue, BellPairAtPointFour) {
  const auto cert = bell_value(make_state<double>({}, kQuarter), kQuarter, 0.4);
  EXPECT_NEAR(cert.beta, 0.0, 1e-15);
  EXPECT_NEAR(cert.i_value, 2.3995056397281864, 1e-12);
  EXPECT_NEAR(cert.h_min, 0.19369433855814439, 1e-12);
  EXPECT_FALSE(cert.overshoot);
}

TEST(BellValue, ProjectiveOnTargetSaturatesTheBound) {
  for (double theta : {kQuarter, 0.5, 0.3, 0.1, 1e-3}) {
    const auto s = make_state<double>({}, theta);
    const auto cert = bell_value(s, theta, 0.0);
    EXPECT_NEAR(cert.i_value, cert.i_max, 1e-12) << theta;
    EXPECT_NEAR(cert.h_min, 1.0, 1e-9) << theta;
  }
}

TEST(BellValue, ClosedFormOnBellPair) {
  const auto phi = make_state<double>({}, kQuarter);
  for (int i = 0; i <= 100; ++i) {
    const double xi = kQuarter * i / 100.0;
    EXPECT_NEAR(bell_value(phi, kQuarter, xi).i_value, std::sqrt(2.0) * (1 + std::cos(2 * xi)), 1e-12);
  }
}

TEST(BellValue, NoisyFirstStepMatchesReference) {
  // Depolarized Bell pair, projective step: I = (1 - p) 2 sqrt(2).
  const auto s = make_state<double>({1.4e-3, 0.0}, kQuarter);
  const auto cert = bell_value(s, kQuarter, 0.0);
  EXPECT_NEAR(cert.i_value, (1 - 1.4e-3) * 2 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(cert.h_min, 0.8959224425609288, 1e-10);
}

TEST(GuessBound, Examples) {
  EXPECT_NEAR(guess_bound(2.5814, 0.0), 0.7890041132925276, 1e-12);
  EXPECT_NEAR(-std::log2(guess_bound(2.5814, 0.0)), 0.3418952734683206, 1e-12);
  EXPECT_DOUBLE_EQ(guess_bound(std::sqrt(8.0), 0.0), 0.5);
  EXPECT_DOUBLE_EQ(guess_bound(2.0, 0.0), 1.0);  // capped
}

TEST(GuessBound, BetaTwoIsUncertifiable) {
  EXPECT_THROW(guess_bound(3.9, 2.0), UncertifiableError);
  const auto cert = certify(2.0, Correlators<double>{1, 1, 0, 1, 0});
  EXPECT_TRUE(cert.uncertifiable);
  EXPECT_EQ(cert.h_min, 0.0);
  EXPECT_TRUE(certify(1.995, Correlators<double>{}).low_confidence);
}

TEST(GuessBound, MonotoneInBellValue) {
  for (double beta : {0.0, 0.5, 1.2, 1.9}) {
    const double lo = local_bound(beta), hi = quantum_bound(beta);
    double prev = 2.0;
    for (int i = 0; i <= 1000; ++i) {
      const double g = guess_bound(lo + (hi - lo) * i / 1000.0, beta);
      EXPECT_LE(g, prev + 1e-15);
      EXPECT_GE(g, 0.5);
      EXPECT_LE(g, 1.0);
      prev = g;
    }
  }
}

TEST(Certify, NothingAtOrBelowTheLocalBound) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> ub(0.0, 1.99), ux(-1.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double beta = ub(rng);
    Correlators<double> c{ux(rng), ux(rng), ux(rng), ux(rng), ux(rng)};
    const auto cert = certify(beta, c);
    if (cert.i_value <= local_bound(beta)) {
      EXPECT_EQ(cert.h_min, 0.0);
      EXPECT_EQ(cert.g_max, 1.0);
    }
    EXPECT_GE(cert.h_min, 0.0);
    EXPECT_LE(cert.h_min, 1.0 + 1e-12);
  }
}

TEST(Certify, OvershootIsFlaggedAndClamped) {
  const auto cert = certify(0.0, Correlators<double>{0, 1, 1, 1, -1});
  EXPECT_TRUE(cert.overshoot);
  EXPECT_DOUBLE_EQ(cert.h_min, 1.0);
}

TEST(BellValue, ProjectiveStepAfterNoiselessChainCertifiesOneBit) {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.05, kQuarter);
  for (int trial = 0; trial < 20; ++trial) {
    const ProtocolConfig config{kQuarter, {u(rng), u(rng), 0.0}, {}};
    const auto tree = evolve_tree<double>(config, 2);
    for (const auto& node : tree[2]) {
      EXPECT_NEAR(bell_value(node.state, node.ideal_theta, 0.0).h_min, 1.0, 1e-9);
    }
  }
}

TEST(BellValue, SmallNoiseAgreesWithExtendedPrecision) {
  // Near saturation the bound subtracts nearly equal numbers; compare the
  // double pipeline against long double.
  for (double p : {1e-9, 1e-8, 1e-7, 1e-6}) {
    const NoiseParams noise{p, 0.0};
    const auto d = bell_value(make_state<double>(noise, kQuarter), kQuarter, 0.0);
    const auto l = bell_value(make_state<long double>(noise, kQuarter), static_cast<long double>(kQuarter), 0.0L);
    EXPECT_NEAR(d.h_min, static_cast<double>(l.h_min), 1e-5 * (1 - static_cast<double>(l.h_min)) + 1e-9) << p;
  }
}

}  // namespace
}  // namespace seqweak
