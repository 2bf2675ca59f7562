#pragma once

// Statistical emulation of the coincidence-counting experiment: Born-rule
// outcome probabilities per setting, Poisson-distributed counts, correlator
// estimation from counts, and bootstrap standard deviations.
//
// Reproducibility contract
//   generator:   std::mt19937_64 seeded with a single 64-bit value
//   uniform:     (engine() >> 11) * 2^-53, in [0, 1)
//   poisson:     mean < 10 by sequential inversion of the CDF; otherwise
//                Hormann's transformed rejection (PTRS)
//   seed split:  derive_seed(s, i) = mix64(s + 0x9E3779B97F4A7C15 * (i + 1)),
//                mix64 being the SplitMix64 output function. Trial t uses
//                derive_seed(master, t); setting/row j inside the trial uses
//                derive_seed(trial_seed, j) and draws n_pp, n_pm, n_mp, n_mm
//                in that order.

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "seqweak/bell.hpp"
#include "seqweak/count_table.hpp"
#include "seqweak/protocol.hpp"

namespace seqweak {

struct SettingSpec {
  int step = 1;
  History history;
  int alice_setting = 0;
  int bob_setting = 0;
  double mean_total_counts = 1.0;
};

// p(+,+), p(+,-), p(-,+), p(-,-) for (Alice, Bob).
using OutcomeProbabilities = std::array<double, 4>;

OutcomeProbabilities outcome_probabilities(const ProtocolConfig& config, const SettingSpec& spec);

// Every step, every history of that step, and all four setting pairs, each
// with the same mean exposure.
std::vector<SettingSpec> full_setting_scan(const ProtocolConfig& config, double mean_total_counts);

std::uint64_t mix64(std::uint64_t z);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
};

Counts sample_counts(const OutcomeProbabilities& probs, double mean_total_counts, std::uint64_t seed);

// Counts rounded from mean_total_counts * probability (no sampling).
CountTable expected_count_table(const ProtocolConfig& config, const std::vector<SettingSpec>& specs);

// One Poisson draw of every setting, using the trial-0 seed schedule.
CountTable sample_count_table(const ProtocolConfig& config, const std::vector<SettingSpec>& specs,
                              std::uint64_t seed);

struct EstimateEntry {
  int step = 1;
  History history;
  BellCertificate<double> certificate;
  double i_value_std = 0.0;
  double h_min_std = 0.0;
  double clamp_fraction = 0.0;  // share of trials whose estimate exceeded I_max
  bool clamp_flagged = false;   // clamp_fraction > 1%
};

struct EstimateReport {
  std::vector<EstimateEntry> entries;  // ordered by step, then history
  std::size_t trials = 0;              // 0 for a point estimate
};

inline constexpr double kClampFlagFraction = 0.01;

// Point estimates from a complete count table. beta_k comes from the
// configuration's ideal Schmidt angles.
EstimateReport estimate(const CountTable& table, const ProtocolConfig& config);

// Resamples counts around the model predictions `trials` times; reports the
// per-quantity means and sample standard deviations.
EstimateReport bootstrap(const ProtocolConfig& config, const std::vector<SettingSpec>& specs,
                         std::size_t trials, std::uint64_t seed);

// Point estimate from `table`, with standard deviations from Poisson
// resampling around the supplied counts.
EstimateReport bootstrap_counts(const CountTable& table, const ProtocolConfig& config,
                                std::size_t trials, std::uint64_t seed);

}  // namespace seqweak
