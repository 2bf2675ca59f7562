#pragma once

// Total certifiable randomness over a measurement sequence, its maximization
// over the strengths, and noise thresholds where the optimal strategy changes.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "seqweak/bell.hpp"
#include "seqweak/noise.hpp"
#include "seqweak/protocol.hpp"

namespace seqweak {

enum class Aggregation { ProbabilityWeighted, WorstCase };

struct StepEntropy {
  int step = 0;
  double h_min = 0.0;          // history-aggregated, bits
  bool uncertifiable = false;  // some branch had beta = 2
};

struct ExtractionSummary {
  std::vector<StepEntropy> per_step;
  double total_bits = 0.0;
  Aggregation aggregation = Aggregation::ProbabilityWeighted;
};

ExtractionSummary total_entropy(const ProtocolConfig& config,
                                Aggregation aggregation = Aggregation::ProbabilityWeighted);

// Evenly spaced values from start to stop inclusive; count 1 gives {start}.
std::vector<double> linspace(double start, double stop, std::size_t count);

struct SweepRow1 {
  double xi1, h1, h2, total;
};
struct SweepRow2 {
  double xi1, xi2, h1, h2, h3, total;
};

// Two steps, the second projective.
std::vector<SweepRow1> sweep_one(const NoiseParams& noise, const std::vector<double>& xi1_grid);
// Three steps, the third projective; rows ordered by xi1 then xi2.
std::vector<SweepRow2> sweep_two(const NoiseParams& noise, const std::vector<double>& xi1_grid,
                                 const std::vector<double>& xi2_grid);

struct MaximizeOptions {
  // Only accept strengths for which every step certifies a positive amount.
  bool require_all_steps = false;
  Aggregation aggregation = Aggregation::ProbabilityWeighted;
  double refine_tolerance = 1e-6;  // rad, golden-section stopping width
};

struct MaximizeResult {
  std::vector<double> strengths;  // size n_steps, last entry 0
  double total_bits = 0.0;        // -inf if no admissible point exists
  double coarse_best = 0.0;       // best value on the coarse grid
  ExtractionSummary summary;
};

// Coarse grid over each free strength (0, log-spaced near 0, then linear up
// to pi/4), followed by cyclic golden-section refinement per coordinate.
std::vector<double> strength_grid();

MaximizeResult maximize(const NoiseParams& noise, int n_steps, const MaximizeOptions& options = {});

enum class ThresholdCriterion { OptimalXi1Zero, OptimalXi2Zero, TotalReaches };

inline constexpr double kZeroStrengthDeadband = 1e-4;

struct ThresholdQuery {
  ThresholdCriterion criterion = ThresholdCriterion::OptimalXi1Zero;
  double bits = 1.0;  // TotalReaches only
  double p_low = 1e-10;
  double p_high = 1e-1;
  double rel_tol = 1e-3;
  double c = 0.0;
  std::optional<int> n_steps;  // default: 2 for xi1, 3 otherwise

  int steps() const;
  void validate() const;
};

struct ThresholdResult {
  double p_thr = 0.0;
  int iterations = 0;
};

// Truth value of the query's criterion at depolarization p.
bool threshold_criterion(const ThresholdQuery& query, double p);

// Bisection on log10(p) between the bracket ends.
ThresholdResult find_threshold(const ThresholdQuery& query);

std::string to_string(ThresholdCriterion criterion);

}  // namespace seqweak
