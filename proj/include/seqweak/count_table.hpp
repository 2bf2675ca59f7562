#pragma once

// Coincidence counts per measurement setting, and their text format:
//
//   step,history,alice_setting,bob_setting,n_pp,n_pm,n_mp,n_mm
//   1,,0,0,2491,312,298,2503
//   2,+,1,1,...
//
// One row per (step, history, alice_setting, bob_setting). Outcome pairs are
// (Alice, Bob); the history is a string over {+,-}, empty for step 1.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "seqweak/protocol.hpp"

namespace seqweak {

// Index order of the four outcome pairs (Alice, Bob).
enum OutcomePair : std::size_t { kPlusPlus = 0, kPlusMinus = 1, kMinusPlus = 2, kMinusMinus = 3 };

using Counts = std::array<std::uint64_t, 4>;

struct CountRow {
  int step = 1;
  History history;
  int alice_setting = 0;
  int bob_setting = 0;
  Counts counts{};
  std::size_t source_row = 0;  // file line the row came from, 0 if built in memory
};

struct CountTable {
  std::vector<CountRow> rows;

  // Every (step, history) group must hold each of the four settings exactly
  // once; throws DataError naming the offending row.
  void validate() const;
};

inline constexpr const char* kCountTableHeader =
    "step,history,alice_setting,bob_setting,n_pp,n_pm,n_mp,n_mm";

void write_count_table(std::ostream& out, const CountTable& table);
CountTable read_count_table(std::istream& in);
CountTable read_count_table_file(const std::string& path);

}  // namespace seqweak
