#include "seqweak/count_table.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>
#include <utility>

#include "seqweak/errors.hpp"

namespace seqweak {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view field, const char* name, std::size_t row) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw DataError(std::string("invalid ") + name + " '" + std::string(field) + "'", row);
  }
  return value;
}

int parse_setting(std::string_view field, const char* name, std::size_t row) {
  const int v = parse_number<int>(field, name, row);
  if (v != 0 && v != 1) throw DataError(std::string(name) + " must be 0 or 1", row);
  return v;
}

}  // namespace

void CountTable::validate() const {
  std::map<std::pair<int, std::string>, std::array<const CountRow*, 4>> groups;
  for (const auto& row : rows) {
    if (row.step < 1) throw DataError("step must be >= 1", row.source_row);
    if (row.history.size() != static_cast<std::size_t>(row.step - 1)) {
      throw DataError("history length must equal step - 1", row.source_row);
    }
    if ((row.alice_setting != 0 && row.alice_setting != 1) || (row.bob_setting != 0 && row.bob_setting != 1)) {
      throw DataError("settings must be 0 or 1", row.source_row);
    }
    auto& slots = groups[{row.step, row.history.str()}];
    auto& slot = slots[static_cast<std::size_t>(2 * row.alice_setting + row.bob_setting)];
    if (slot != nullptr) {
      throw DataError("duplicate row for step " + std::to_string(row.step) + ", history '" +
                          row.history.str() + "', settings " + std::to_string(row.alice_setting) +
                          std::to_string(row.bob_setting),
                      row.source_row);
    }
    slot = &row;
  }
  for (const auto& [key, slots] : groups) {
    for (std::size_t s = 0; s < 4; ++s) {
      if (slots[s] != nullptr) continue;
      const CountRow* any = nullptr;
      for (const auto* r : slots) {
        if (r != nullptr) any = r;
      }
      throw DataError("missing row for step " + std::to_string(key.first) + ", history '" + key.second +
                          "', settings " + std::to_string(s / 2) + std::to_string(s % 2),
                      any ? any->source_row : 0);
    }
  }
}

void write_count_table(std::ostream& out, const CountTable& table) {
  out << kCountTableHeader << '\n';
  for (const auto& r : table.rows) {
    out << r.step << ',' << r.history.str() << ',' << r.alice_setting << ',' << r.bob_setting;
    for (auto n : r.counts) out << ',' << n;
    out << '\n';
  }
}

CountTable read_count_table(std::istream& in) {
  CountTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (!have_header) {
      std::string normalized;
      for (auto f : split(text, ',')) {
        if (!normalized.empty()) normalized += ',';
        normalized += f;
      }
      if (normalized != kCountTableHeader) {
        throw DataError(std::string("expected header '") + kCountTableHeader + "'", line_no);
      }
      have_header = true;
      continue;
    }
    const auto fields = split(text, ',');
    if (fields.size() != 8) {
      throw DataError("expected 8 fields, found " + std::to_string(fields.size()), line_no);
    }
    CountRow row;
    row.source_row = line_no;
    row.step = parse_number<int>(fields[0], "step", line_no);
    try {
      row.history = History::parse(fields[1]);
    } catch (const DomainError& e) {
      throw DataError(e.what(), line_no);
    }
    row.alice_setting = parse_setting(fields[2], "alice_setting", line_no);
    row.bob_setting = parse_setting(fields[3], "bob_setting", line_no);
    static constexpr const char* names[4] = {"n_pp", "n_pm", "n_mp", "n_mm"};
    for (std::size_t i = 0; i < 4; ++i) {
      row.counts[i] = parse_number<std::uint64_t>(fields[4 + i], names[i], line_no);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError("count table is empty (no header)");
  if (table.rows.empty()) throw DataError("count table has no data rows");
  table.validate();
  return table;
}

CountTable read_count_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open count file '" + path + "'");
  return read_count_table(in);
}

}  // namespace seqweak
