#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "seqweak/errors.hpp"

namespace seqweak::cli {
namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr double kQuarter = std::numbers::pi / 4;
constexpr double kRoundedQuarterSlack = 1e-3;

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("invalid " + what + " '" + text + "'");
  }
}

double snap_quarter(double x) {
  return (x > kQuarter && x <= kQuarter + kRoundedQuarterSlack) ? kQuarter : x;
}

// Writes to --out when given, otherwise to the command's output stream.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path);
  if (!file) throw UsageError("cannot open output file '" + path + "'");
  write(file);
}

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(); }

struct SweepArgs {
  double p = 0.0, c = 0.0;
  std::string xi1_grid, xi2_grid, out, format = "csv";
};

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  if (a.format != "csv" && a.format != "json") throw UsageError("--format must be csv or json");
  const NoiseParams noise{a.p, a.c};
  const auto g1 = parse_grid(a.xi1_grid);
  std::ostringstream buf;
  buf << std::setprecision(17);
  if (a.xi2_grid.empty()) {
    const auto rows = sweep_one(noise, g1);
    if (a.format == "csv") {
      buf << "xi1,h1,h2,total\n";
      for (const auto& r : rows) buf << r.xi1 << ',' << r.h1 << ',' << r.h2 << ',' << r.total << '\n';
    } else {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) j.push_back({{"xi1", r.xi1}, {"h1", r.h1}, {"h2", r.h2}, {"total", r.total}});
      buf << nlohmann::json{{"p", a.p}, {"c", a.c}, {"rows", j}}.dump(2) << '\n';
    }
  } else {
    const auto rows = sweep_two(noise, g1, parse_grid(a.xi2_grid));
    if (a.format == "csv") {
      buf << "xi1,xi2,h1,h2,h3,total\n";
      for (const auto& r : rows) {
        buf << r.xi1 << ',' << r.xi2 << ',' << r.h1 << ',' << r.h2 << ',' << r.h3 << ',' << r.total << '\n';
      }
    } else {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& r : rows) {
        j.push_back({{"xi1", r.xi1}, {"xi2", r.xi2}, {"h1", r.h1}, {"h2", r.h2}, {"h3", r.h3}, {"total", r.total}});
      }
      buf << nlohmann::json{{"p", a.p}, {"c", a.c}, {"rows", j}}.dump(2) << '\n';
    }
  }
  emit(a.out, out, [&](std::ostream& os) { os << buf.str(); });
}

struct ThresholdArgs {
  std::string criterion;
  double p_low = 1e-10, p_high = 1e-1, rel_tol = 1e-3, c = 0.0;
  int steps = 0;
};

void cmd_thresholds(const ThresholdArgs& a, std::ostream& out) {
  ThresholdQuery q;
  q.p_low = a.p_low;
  q.p_high = a.p_high;
  q.rel_tol = a.rel_tol;
  q.c = a.c;
  if (a.steps != 0) q.n_steps = a.steps;
  if (a.criterion == "xi1") {
    q.criterion = ThresholdCriterion::OptimalXi1Zero;
  } else if (a.criterion == "xi2") {
    q.criterion = ThresholdCriterion::OptimalXi2Zero;
  } else if (a.criterion.rfind("bits:", 0) == 0) {
    q.criterion = ThresholdCriterion::TotalReaches;
    q.bits = parse_double(a.criterion.substr(5), "bit target");
  } else {
    throw UsageError("--criterion must be xi1, xi2 or bits:<x>");
  }
  const auto r = find_threshold(q);
  out << nlohmann::json{{"criterion", a.criterion}, {"p_thr", r.p_thr}, {"iterations", r.iterations}}.dump()
      << '\n';
}

struct OptimizeArgs {
  double p = 0.0, c = 0.0;
  int steps = 2;
  bool all_steps = false;
  std::string out;
};

void cmd_optimize(const OptimizeArgs& a, std::ostream& out) {
  MaximizeOptions opts;
  opts.require_all_steps = a.all_steps;
  const auto r = maximize({a.p, a.c}, a.steps, opts);
  emit(a.out, out, [&](std::ostream& os) { os << to_json(r).dump(2) << '\n'; });
}

struct SimulateArgs {
  double p = 0.0, c = 0.0, theta1 = kQuarter, counts = 1e5;
  std::string strengths, out, dump_counts;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const ProtocolConfig config{snap_quarter(a.theta1), parse_list(a.strengths), {a.p, a.c}};
  const auto specs = full_setting_scan(config, a.counts);
  if (!a.dump_counts.empty()) {
    std::ofstream file(a.dump_counts);
    if (!file) throw UsageError("cannot open '" + a.dump_counts + "'");
    write_count_table(file, sample_count_table(config, specs, a.seed));
  }
  const auto report = bootstrap(config, specs, a.trials, a.seed);
  auto j = to_json(report);
  j["seed"] = a.seed;
  emit(a.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

struct CertifyArgs {
  std::string counts_file, strengths, out;
  double theta1 = kQuarter;
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
};

void cmd_certify(const CertifyArgs& a, std::ostream& out) {
  const ProtocolConfig config{snap_quarter(a.theta1), parse_list(a.strengths), {}};
  config.validate();
  const auto table = read_count_table_file(a.counts_file);
  const auto report = bootstrap_counts(table, config, a.trials, a.seed);
  auto j = to_json(report);
  j["seed"] = a.seed;
  emit(a.out, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw UsageError("grid must be start:stop:n (got '" + text + "')");
  const double start = snap_quarter(parse_double(parts[0], "grid start"));
  const double stop = snap_quarter(parse_double(parts[1], "grid stop"));
  std::size_t count = 0;
  try {
    std::size_t used = 0;
    const long long n = std::stoll(parts[2], &used);
    if (used != parts[2].size() || n < 1) throw std::invalid_argument(parts[2]);
    count = static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw UsageError("grid point count must be a positive integer (got '" + parts[2] + "')");
  }
  if (stop < start) throw UsageError("grid stop is below its start");
  auto grid = linspace(start, stop, count);
  for (double& x : grid) x = std::min(x, stop);
  return grid;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(snap_quarter(parse_double(item, "strength")));
  if (out.empty()) throw UsageError("empty strength list");
  return out;
}

nlohmann::json to_json(const EstimateReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    const auto& c = e.certificate;
    entries.push_back({{"step", e.step},
                       {"history", e.history.str()},
                       {"beta", c.beta},
                       {"correlators",
                        {{"b0", c.correlators.b0},
                         {"a0b0", c.correlators.a0b0},
                         {"a0b1", c.correlators.a0b1},
                         {"a1b0", c.correlators.a1b0},
                         {"a1b1", c.correlators.a1b1}}},
                       {"i_value", c.i_value},
                       {"i_max", c.i_max},
                       {"g_max", c.g_max},
                       {"h_min", c.h_min},
                       {"i_value_std", e.i_value_std},
                       {"h_min_std", e.h_min_std},
                       {"clamp_fraction", e.clamp_fraction},
                       {"clamp_flagged", e.clamp_flagged},
                       {"overshoot", c.overshoot},
                       {"uncertifiable", c.uncertifiable},
                       {"low_confidence", c.low_confidence}});
  }
  return {{"trials", report.trials}, {"entries", entries}};
}

nlohmann::json to_json(const MaximizeResult& result) {
  nlohmann::json per_step = nlohmann::json::array();
  for (const auto& s : result.summary.per_step) {
    per_step.push_back({{"step", s.step}, {"h_min", s.h_min}, {"uncertifiable", s.uncertifiable}});
  }
  return {{"strengths", result.strengths}, {"total_bits", number_or_null(result.total_bits)}, {"per_step", per_step}};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "seqweak: sequential weak-measurement randomness certification.\n"
      "All angles (theta1, xi) are in radians, each within [0, pi/4]."};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* sc_sweep = app.add_subcommand("sweep", "Total min-entropy over a grid of first (and second) strengths");
  sc_sweep->add_option("--p", sweep.p, "Depolarization weight")->required();
  sc_sweep->add_option("--c", sweep.c, "Decoherence weight");
  sc_sweep->add_option("--xi1-grid", sweep.xi1_grid, "start:stop:n, radians")->required();
  sc_sweep->add_option("--xi2-grid", sweep.xi2_grid, "start:stop:n, radians; adds a third projective step");
  sc_sweep->add_option("--out", sweep.out, "Output file (default stdout)");
  sc_sweep->add_option("--format", sweep.format, "csv or json");

  ThresholdArgs thr;
  auto* sc_thr = app.add_subcommand("thresholds", "Bisect the depolarization where the optimal strategy changes");
  sc_thr->add_option("--criterion", thr.criterion, "xi1, xi2 or bits:<x>")->required();
  sc_thr->add_option("--p-low", thr.p_low, "Lower bracket end");
  sc_thr->add_option("--p-high", thr.p_high, "Upper bracket end");
  sc_thr->add_option("--rel-tol", thr.rel_tol, "Relative tolerance on p");
  sc_thr->add_option("--c", thr.c, "Decoherence weight");
  sc_thr->add_option("--steps", thr.steps, "Number of steps (default 2 for xi1, 3 otherwise)");

  OptimizeArgs opt;
  auto* sc_opt = app.add_subcommand("optimize", "Maximize total min-entropy over the strengths");
  sc_opt->add_option("--p", opt.p, "Depolarization weight")->required();
  sc_opt->add_option("--c", opt.c, "Decoherence weight");
  sc_opt->add_option("--steps", opt.steps, "1, 2 or 3; the last step is projective");
  sc_opt->add_flag("--all-steps", opt.all_steps, "Only accept points where every step certifies randomness");
  sc_opt->add_option("--out", opt.out, "Output file (default stdout)");

  SimulateArgs sim;
  auto* sc_sim = app.add_subcommand("simulate", "Poisson Monte Carlo of the counting experiment");
  sc_sim->add_option("--p", sim.p, "Depolarization weight")->required();
  sc_sim->add_option("--c", sim.c, "Decoherence weight");
  sc_sim->add_option("--theta1", sim.theta1, "Source Schmidt angle, radians");
  sc_sim->add_option("--strengths", sim.strengths, "Comma-separated xi_k, radians")->required();
  sc_sim->add_option("--counts", sim.counts, "Mean coincidences per setting");
  sc_sim->add_option("--trials", sim.trials, "Monte Carlo trials");
  sc_sim->add_option("--seed", sim.seed, "Master seed");
  sc_sim->add_option("--out", sim.out, "Output file (default stdout)");
  sc_sim->add_option("--dump-counts", sim.dump_counts, "Write one sampled count table here");

  CertifyArgs cert;
  auto* sc_cert = app.add_subcommand("certify", "Certificates and bootstrap errors from a count table");
  sc_cert->add_option("--counts-file", cert.counts_file, "Count table (CSV)")->required();
  sc_cert->add_option("--theta1", cert.theta1, "Source Schmidt angle, radians");
  sc_cert->add_option("--strengths", cert.strengths, "Comma-separated xi_k, radians")->required();
  sc_cert->add_option("--trials", cert.trials, "Bootstrap trials");
  sc_cert->add_option("--seed", cert.seed, "Master seed");
  sc_cert->add_option("--out", cert.out, "Output file (default stdout)");

  std::vector<std::string> argv_storage{"seqweak"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : argv_storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sc_sweep) cmd_sweep(sweep, out);
    if (*sc_thr) cmd_thresholds(thr, out);
    if (*sc_opt) cmd_optimize(opt, out);
    if (*sc_sim) cmd_simulate(sim, out);
    if (*sc_cert) cmd_certify(cert, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const BracketError& e) {
    err << "error: " << e.what() << '\n';
    return kBracketing;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataFile;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kNumericDomain;
  }
  return kOk;
}

}  // namespace seqweak::cli
