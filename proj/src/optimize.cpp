#include "seqweak/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "seqweak/parallel.hpp"

namespace seqweak {
namespace {

constexpr double kQuarter = std::numbers::pi / 4;
constexpr double kInvPhi = 0.6180339887498948482;  // 1 / golden ratio
constexpr int kMaxRefineSweeps = 50;
// Totals closer than this are ties. A noninteractive step (xi = pi/4) followed
// by a projective one reproduces a single projective step, and near the
// quantum bound the square root in the guessing bound magnifies rounding in I
// to ~1e-11 bits. The earlier grid point, i.e. the smaller strength, wins ties.
constexpr double kTieTolerance = 1e-9;

ProtocolConfig ideal_source_config(const NoiseParams& noise, std::vector<double> strengths) {
  return {kQuarter, std::move(strengths), noise};
}

std::vector<double> with_final_projective(const std::vector<double>& free) {
  std::vector<double> s = free;
  s.push_back(0.0);
  return s;
}

struct Objective {
  const NoiseParams& noise;
  const MaximizeOptions& options;

  double operator()(const std::vector<double>& free) const {
    const auto summary = total_entropy(ideal_source_config(noise, with_final_projective(free)),
                                       options.aggregation);
    if (options.require_all_steps) {
      for (const auto& s : summary.per_step) {
        if (!(s.h_min > 0.0)) return -std::numeric_limits<double>::infinity();
      }
    }
    return summary.total_bits;
  }
};

// Maximizes f on [lo, hi]; returns the best point seen (endpoints included).
template <typename F>
std::pair<double, double> golden_section_max(F&& f, double lo, double hi, double tol) {
  double best_x = lo;
  double best_f = f(lo);
  auto consider = [&](double x, double fx) {
    if (fx > best_f + kTieTolerance) {
      best_f = fx;
      best_x = x;
    }
  };
  consider(hi, f(hi));
  double a = lo;
  double b = hi;
  double c = b - (b - a) * kInvPhi;
  double d = a + (b - a) * kInvPhi;
  double fc = f(c);
  double fd = f(d);
  consider(c, fc);
  consider(d, fd);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * kInvPhi;
      fc = f(c);
      consider(c, fc);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * kInvPhi;
      fd = f(d);
      consider(d, fd);
    }
  }
  return {best_x, best_f};
}

double neighbor_width(const std::vector<double>& grid, std::size_t index) {
  double w = 0.0;
  if (index > 0) w = std::max(w, grid[index] - grid[index - 1]);
  if (index + 1 < grid.size()) w = std::max(w, grid[index + 1] - grid[index]);
  return w;
}

}  // namespace

ExtractionSummary total_entropy(const ProtocolConfig& config, Aggregation aggregation) {
  config.validate();
  ExtractionSummary out;
  out.aggregation = aggregation;
  const std::size_t n = config.strengths.size();
  if (n == 0) return out;

  // The final step only needs the state before it.
  const auto tree = evolve_tree<double>(config, n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    StepEntropy step{static_cast<int>(k + 1), 0.0, false};
    double weighted = 0.0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& node : tree[k]) {
      const auto cert = bell_value(node.state, node.ideal_theta, config.strengths[k]);
      step.uncertifiable = step.uncertifiable || cert.uncertifiable;
      weighted += node.probability * cert.h_min;
      worst = std::min(worst, cert.h_min);
    }
    step.h_min = aggregation == Aggregation::ProbabilityWeighted ? weighted : worst;
    out.total_bits += step.h_min;
    out.per_step.push_back(step);
  }
  return out;
}

std::vector<double> linspace(double start, double stop, std::size_t count) {
  std::vector<double> out;
  if (count == 0) return out;
  if (count == 1) return {start};
  out.reserve(count);
  const double step = (stop - start) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i + 1 < count; ++i) out.push_back(start + step * static_cast<double>(i));
  out.push_back(stop);
  return out;
}

std::vector<SweepRow1> sweep_one(const NoiseParams& noise, const std::vector<double>& xi1_grid) {
  noise.validate();
  std::vector<double> sorted = xi1_grid;
  std::stable_sort(sorted.begin(), sorted.end());
  std::vector<SweepRow1> rows(sorted.size());
  parallel_for(sorted.size(), [&](std::size_t i) {
    const auto s = total_entropy(ideal_source_config(noise, {sorted[i], 0.0}));
    rows[i] = {sorted[i], s.per_step[0].h_min, s.per_step[1].h_min, s.total_bits};
  });
  return rows;
}

std::vector<SweepRow2> sweep_two(const NoiseParams& noise, const std::vector<double>& xi1_grid,
                                 const std::vector<double>& xi2_grid) {
  noise.validate();
  std::vector<double> g1 = xi1_grid;
  std::vector<double> g2 = xi2_grid;
  std::stable_sort(g1.begin(), g1.end());
  std::stable_sort(g2.begin(), g2.end());
  std::vector<SweepRow2> rows(g1.size() * g2.size());
  parallel_for(rows.size(), [&](std::size_t idx) {
    const double x1 = g1[idx / g2.size()];
    const double x2 = g2[idx % g2.size()];
    const auto s = total_entropy(ideal_source_config(noise, {x1, x2, 0.0}));
    rows[idx] = {x1, x2, s.per_step[0].h_min, s.per_step[1].h_min, s.per_step[2].h_min, s.total_bits};
  });
  return rows;
}

std::vector<double> strength_grid() {
  std::vector<double> grid{0.0};
  constexpr int kLogPoints = 80;
  constexpr double kLogLo = 1e-5;
  constexpr double kLinStart = 0.05;
  const double ratio = std::pow(kLinStart / kLogLo, 1.0 / kLogPoints);
  double x = kLogLo;
  for (int i = 0; i < kLogPoints; ++i, x *= ratio) grid.push_back(x);
  const auto lin = linspace(kLinStart, kQuarter, 120);
  grid.insert(grid.end(), lin.begin(), lin.end());
  return grid;
}

MaximizeResult maximize(const NoiseParams& noise, int n_steps, const MaximizeOptions& options) {
  if (n_steps < 1 || n_steps > 3) throw DomainError("maximize supports 1 to 3 steps");
  noise.validate();
  const Objective objective{noise, options};
  const std::size_t n_free = static_cast<std::size_t>(n_steps - 1);

  MaximizeResult result;
  if (n_free == 0) {
    result.total_bits = result.coarse_best = objective({});
    result.strengths = {0.0};
    result.summary = total_entropy(ideal_source_config(noise, result.strengths), options.aggregation);
    return result;
  }

  // Coarse grid, first coordinate most significant; ties keep the earliest index.
  const auto grid = strength_grid();
  const std::size_t g = grid.size();
  std::size_t n_points = 1;
  for (std::size_t i = 0; i < n_free; ++i) n_points *= g;
  auto decode = [&](std::size_t idx) {
    std::vector<std::size_t> multi(n_free);
    for (std::size_t i = n_free; i-- > 0;) {
      multi[i] = idx % g;
      idx /= g;
    }
    return multi;
  };
  std::vector<double> values(n_points);
  parallel_for(n_points, [&](std::size_t idx) {
    std::vector<double> x;
    for (std::size_t m : decode(idx)) x.push_back(grid[m]);
    values[idx] = objective(x);
  });
  const double coarse_max = *std::max_element(values.begin(), values.end());
  std::size_t best_idx = 0;
  while (!(values[best_idx] >= coarse_max - kTieTolerance)) ++best_idx;
  const auto best_multi = decode(best_idx);

  std::vector<double> x(n_free);
  std::vector<double> width(n_free);
  for (std::size_t i = 0; i < n_free; ++i) {
    x[i] = grid[best_multi[i]];
    width[i] = neighbor_width(grid, best_multi[i]);
  }
  double fx = values[best_idx];
  result.coarse_best = coarse_max;

  if (std::isfinite(fx)) {
    for (int sweep = 0; sweep < kMaxRefineSweeps; ++sweep) {
      bool improved = false;
      for (std::size_t i = 0; i < n_free; ++i) {
        auto along = [&](double t) {
          auto y = x;
          y[i] = t;
          return objective(y);
        };
        const double lo = std::max(0.0, x[i] - width[i]);
        const double hi = std::min(kQuarter, x[i] + width[i]);
        const auto [t, ft] = golden_section_max(along, lo, hi, options.refine_tolerance);
        if (ft > fx + kTieTolerance) {
          improved = true;
          x[i] = t;
          fx = ft;
        }
      }
      if (!improved) break;
    }
  }

  // Steps after a projective one certify nothing; report their strengths as 0.
  const auto first_zero = std::find(x.begin(), x.end(), 0.0);
  if (first_zero != x.end()) std::fill(first_zero, x.end(), 0.0);

  result.strengths = with_final_projective(x);
  result.total_bits = fx;
  result.summary = total_entropy(ideal_source_config(noise, result.strengths), options.aggregation);
  return result;
}

int ThresholdQuery::steps() const {
  if (n_steps) return *n_steps;
  return criterion == ThresholdCriterion::OptimalXi1Zero ? 2 : 3;
}

void ThresholdQuery::validate() const {
  if (!(p_low > 0.0) || !(p_low < p_high)) throw DomainError("threshold bracket needs 0 < p_low < p_high");
  if (p_high + c > 1.0) throw DomainError("threshold bracket exceeds p + c <= 1");
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be positive");
  const int n = steps();
  if (n < 1 || n > 3) throw DomainError("threshold search supports 1 to 3 steps");
  if (criterion == ThresholdCriterion::OptimalXi1Zero && n < 2) {
    throw DomainError("criterion xi1 needs at least 2 steps");
  }
  if (criterion == ThresholdCriterion::OptimalXi2Zero && n < 3) {
    throw DomainError("criterion xi2 needs 3 steps");
  }
}

bool threshold_criterion(const ThresholdQuery& query, double p) {
  const NoiseParams noise{p, query.c};
  switch (query.criterion) {
    case ThresholdCriterion::OptimalXi1Zero:
      return maximize(noise, query.steps()).strengths[0] <= kZeroStrengthDeadband;
    case ThresholdCriterion::OptimalXi2Zero:
      return maximize(noise, query.steps()).strengths[1] <= kZeroStrengthDeadband;
    case ThresholdCriterion::TotalReaches: {
      MaximizeOptions opts;
      opts.require_all_steps = true;
      return maximize(noise, query.steps(), opts).total_bits >= query.bits;
    }
  }
  return false;
}

ThresholdResult find_threshold(const ThresholdQuery& query) {
  query.validate();
  double lo = std::log10(query.p_low);
  double hi = std::log10(query.p_high);
  const bool at_lo = threshold_criterion(query, query.p_low);
  const bool at_hi = threshold_criterion(query, query.p_high);
  if (at_lo == at_hi) {
    throw BracketError("criterion " + to_string(query.criterion) + " has the same value (" +
                       (at_lo ? "true" : "false") + ") at both ends of the bracket");
  }
  ThresholdResult out;
  while (std::pow(10.0, hi - lo) - 1.0 > query.rel_tol) {
    const double mid = 0.5 * (lo + hi);
    if (threshold_criterion(query, std::pow(10.0, mid)) == at_hi) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++out.iterations;
  }
  out.p_thr = std::pow(10.0, 0.5 * (lo + hi));
  return out;
}

std::string to_string(ThresholdCriterion criterion) {
  switch (criterion) {
    case ThresholdCriterion::OptimalXi1Zero:
      return "xi1";
    case ThresholdCriterion::OptimalXi2Zero:
      return "xi2";
    case ThresholdCriterion::TotalReaches:
      return "bits";
  }
  return "unknown";
}

}  // namespace seqweak
