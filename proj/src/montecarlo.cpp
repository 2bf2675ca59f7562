#include "seqweak/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "seqweak/errors.hpp"
#include "seqweak/parallel.hpp"

namespace seqweak {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

void check_spec(const ProtocolConfig& config, const SettingSpec& spec) {
  if (spec.step < 1 || static_cast<std::size_t>(spec.step) > config.strengths.size()) {
    throw DomainError("step " + std::to_string(spec.step) + " is outside the configured sequence");
  }
  if (spec.history.size() != static_cast<std::size_t>(spec.step - 1)) {
    throw DomainError("history length must equal step - 1");
  }
  if ((spec.alice_setting != 0 && spec.alice_setting != 1) || (spec.bob_setting != 0 && spec.bob_setting != 1)) {
    throw DomainError("settings must be 0 or 1");
  }
}

OutcomeProbabilities probabilities_on(const BranchNode<double>& node, double xi, int alice_setting,
                                      int bob_setting) {
  const auto obs = observables(node.ideal_theta, xi);
  const auto id = identity2<double>();
  const auto& a = alice_setting == 0 ? obs.a0 : obs.a1;
  const auto kraus = kraus_pair(xi);

  OutcomeProbabilities out{};
  for (int ia = 0; ia < 2; ++ia) {
    const double sa = ia == 0 ? 1.0 : -1.0;
    const QubitOperator<double> alice_proj = 0.5 * (id + sa * a);
    for (int ib = 0; ib < 2; ++ib) {
      const double sb = ib == 0 ? 1.0 : -1.0;
      QubitOperator<double> bob_effect;
      if (bob_setting == 0) {
        bob_effect = 0.5 * (id + sb * obs.b0);
      } else {
        const auto& k = ib == 0 ? kraus.plus : kraus.minus;
        bob_effect = k.adjoint() * k;
      }
      out[static_cast<std::size_t>(2 * ia + ib)] =
          std::max(0.0, expect(node.state, tensor(alice_proj, bob_effect)));
    }
  }
  return out;
}

double correlation(const Counts& n, std::size_t row) {
  const double total = static_cast<double>(n[0] + n[1] + n[2] + n[3]);
  if (total == 0.0) throw InsufficientDataError("setting has zero total counts", row);
  return (static_cast<double>(n[kPlusPlus]) + static_cast<double>(n[kMinusMinus]) -
          static_cast<double>(n[kPlusMinus]) - static_cast<double>(n[kMinusPlus])) /
         total;
}

double bob_marginal(const Counts& n, std::size_t row) {
  const double total = static_cast<double>(n[0] + n[1] + n[2] + n[3]);
  if (total == 0.0) throw InsufficientDataError("setting has zero total counts", row);
  return (static_cast<double>(n[kPlusPlus]) + static_cast<double>(n[kMinusPlus]) -
          static_cast<double>(n[kPlusMinus]) - static_cast<double>(n[kMinusMinus])) /
         total;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// Combines per-trial estimates. With `point` the certificate is taken from
// it; otherwise it holds trial means.
EstimateReport summarize(const std::vector<EstimateReport>& trials, const EstimateReport* point) {
  EstimateReport out;
  out.trials = trials.size();
  const std::size_t n_entries = trials.front().entries.size();
  for (std::size_t e = 0; e < n_entries; ++e) {
    std::vector<double> b0, a0b0, a0b1, a1b0, a1b1, iv, gv, hv;
    std::size_t clamped = 0;
    for (const auto& t : trials) {
      const auto& c = t.entries[e].certificate;
      b0.push_back(c.correlators.b0);
      a0b0.push_back(c.correlators.a0b0);
      a0b1.push_back(c.correlators.a0b1);
      a1b0.push_back(c.correlators.a1b0);
      a1b1.push_back(c.correlators.a1b1);
      iv.push_back(c.i_value);
      gv.push_back(c.g_max);
      hv.push_back(c.h_min);
      if (c.overshoot) ++clamped;
    }
    EstimateEntry entry;
    entry.step = trials.front().entries[e].step;
    entry.history = trials.front().entries[e].history;
    if (point != nullptr) {
      entry.certificate = point->entries[e].certificate;
    } else {
      auto& c = entry.certificate;
      c = trials.front().entries[e].certificate;
      c.correlators = {mean_of(b0), mean_of(a0b0), mean_of(a0b1), mean_of(a1b0), mean_of(a1b1)};
      c.i_value = mean_of(iv);
      c.g_max = mean_of(gv);
      c.h_min = mean_of(hv);
      c.overshoot = clamped > 0;
    }
    entry.i_value_std = sample_std(iv);
    entry.h_min_std = sample_std(hv);
    entry.clamp_fraction = static_cast<double>(clamped) / static_cast<double>(trials.size());
    entry.clamp_flagged = entry.clamp_fraction > kClampFlagFraction;
    out.entries.push_back(std::move(entry));
  }
  return out;
}

void check_trials(std::size_t trials) {
  if (trials < 2) throw DomainError("bootstrap needs at least 2 trials");
}

}  // namespace

OutcomeProbabilities outcome_probabilities(const ProtocolConfig& config, const SettingSpec& spec) {
  config.validate();
  check_spec(config, spec);
  const auto node = follow_history<double>(config, spec.history);
  return probabilities_on(node, config.strengths[static_cast<std::size_t>(spec.step - 1)], spec.alice_setting,
                          spec.bob_setting);
}

std::vector<SettingSpec> full_setting_scan(const ProtocolConfig& config, double mean_total_counts) {
  config.validate();
  if (!(mean_total_counts > 0.0)) throw DomainError("mean counts per setting must be positive");
  std::vector<SettingSpec> specs;
  std::vector<History> level{History{}};
  for (std::size_t k = 0; k < config.strengths.size(); ++k) {
    for (const auto& h : level) {
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) specs.push_back({static_cast<int>(k + 1), h, a, b, mean_total_counts});
      }
    }
    std::vector<History> next;
    for (const auto& h : level) {
      next.push_back(h.then(Outcome::Plus));
      next.push_back(h.then(Outcome::Minus));
    }
    level = std::move(next);
  }
  return specs;
}

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master + kGolden * (index + 1));
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("Poisson mean must be finite and non-negative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && p > 0.0) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
    }
    return k;
  }
  // PTRS, W. Hormann, Insurance: Mathematics and Economics 12 (1993) 39-45.
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

Counts sample_counts(const OutcomeProbabilities& probs, double mean_total_counts, std::uint64_t seed) {
  if (!(mean_total_counts > 0.0)) throw DomainError("mean counts per setting must be positive");
  Rng rng(seed);
  Counts out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = rng.poisson(mean_total_counts * probs[i]);
  return out;
}

CountTable expected_count_table(const ProtocolConfig& config, const std::vector<SettingSpec>& specs) {
  CountTable table;
  for (const auto& spec : specs) {
    const auto probs = outcome_probabilities(config, spec);
    CountRow row{spec.step, spec.history, spec.alice_setting, spec.bob_setting, {}, 0};
    for (std::size_t i = 0; i < 4; ++i) {
      row.counts[i] = static_cast<std::uint64_t>(std::llround(spec.mean_total_counts * probs[i]));
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

CountTable sample_count_table(const ProtocolConfig& config, const std::vector<SettingSpec>& specs,
                              std::uint64_t seed) {
  const std::uint64_t trial_seed = derive_seed(seed, 0);
  CountTable table;
  for (std::size_t j = 0; j < specs.size(); ++j) {
    const auto& spec = specs[j];
    table.rows.push_back({spec.step, spec.history, spec.alice_setting, spec.bob_setting,
                          sample_counts(outcome_probabilities(config, spec), spec.mean_total_counts,
                                        derive_seed(trial_seed, j)),
                          0});
  }
  return table;
}

EstimateReport estimate(const CountTable& table, const ProtocolConfig& config) {
  config.validate();
  table.validate();
  const auto thetas = ideal_thetas<double>(config);

  std::map<std::pair<int, std::string>, std::array<const CountRow*, 4>> groups;
  for (const auto& row : table.rows) {
    if (static_cast<std::size_t>(row.step) > config.strengths.size()) {
      throw DataError("step " + std::to_string(row.step) + " exceeds the configured number of steps",
                      row.source_row);
    }
    groups[{row.step, row.history.str()}][static_cast<std::size_t>(2 * row.alice_setting + row.bob_setting)] =
        &row;
  }

  EstimateReport report;
  for (const auto& [key, rows] : groups) {
    Correlators<double> corr;
    corr.b0 = 0.5 * (bob_marginal(rows[0]->counts, rows[0]->source_row) +
                     bob_marginal(rows[2]->counts, rows[2]->source_row));
    corr.a0b0 = correlation(rows[0]->counts, rows[0]->source_row);
    corr.a0b1 = correlation(rows[1]->counts, rows[1]->source_row);
    corr.a1b0 = correlation(rows[2]->counts, rows[2]->source_row);
    corr.a1b1 = correlation(rows[3]->counts, rows[3]->source_row);

    EstimateEntry entry;
    entry.step = key.first;
    entry.history = rows[0]->history;
    entry.certificate = certify(beta_of(thetas[static_cast<std::size_t>(key.first - 1)]), corr);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

EstimateReport bootstrap(const ProtocolConfig& config, const std::vector<SettingSpec>& specs,
                         std::size_t trials, std::uint64_t seed) {
  check_trials(trials);
  if (specs.empty()) throw DomainError("no settings to simulate");
  std::vector<OutcomeProbabilities> probs;
  probs.reserve(specs.size());
  for (const auto& spec : specs) {
    if (!(spec.mean_total_counts > 0.0)) throw DomainError("mean counts per setting must be positive");
    probs.push_back(outcome_probabilities(config, spec));
  }

  std::vector<EstimateReport> per_trial(trials);
  parallel_for(trials, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    CountTable table;
    table.rows.reserve(specs.size());
    for (std::size_t j = 0; j < specs.size(); ++j) {
      const auto& spec = specs[j];
      table.rows.push_back({spec.step, spec.history, spec.alice_setting, spec.bob_setting,
                            sample_counts(probs[j], spec.mean_total_counts, derive_seed(trial_seed, j)), 0});
    }
    per_trial[t] = estimate(table, config);
  });
  return summarize(per_trial, nullptr);
}

EstimateReport bootstrap_counts(const CountTable& table, const ProtocolConfig& config, std::size_t trials,
                                std::uint64_t seed) {
  check_trials(trials);
  const EstimateReport point = estimate(table, config);

  std::vector<EstimateReport> per_trial(trials);
  parallel_for(trials, [&](std::size_t t) {
    const std::uint64_t trial_seed = derive_seed(seed, t);
    CountTable resampled = table;
    for (std::size_t j = 0; j < resampled.rows.size(); ++j) {
      Rng rng(derive_seed(trial_seed, j));
      for (auto& n : resampled.rows[j].counts) n = rng.poisson(static_cast<double>(n));
    }
    per_trial[t] = estimate(resampled, config);
  });
  auto report = summarize(per_trial, &point);
  return report;
}

}  // namespace seqweak
