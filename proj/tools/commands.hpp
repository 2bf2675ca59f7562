#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "seqweak/montecarlo.hpp"
#include "seqweak/optimize.hpp"

namespace seqweak::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kNumericDomain = 3, kBracketing = 4, kDataFile = 5 };

// Runs one command line. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "start:stop:n"; values up to 1e-3 above pi/4 are clamped to pi/4 so that
// rounded endpoints such as 0.7854 are accepted.
std::vector<double> parse_grid(const std::string& text);
// "0.4,0.1,0"
std::vector<double> parse_list(const std::string& text);

nlohmann::json to_json(const EstimateReport& report);
nlohmann::json to_json(const MaximizeResult& result);

}  // namespace seqweak::cli
