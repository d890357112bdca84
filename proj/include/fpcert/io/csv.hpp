#pragma once

// Coefficient vectors in CSV: one vector per row, decimal or "p/q" entries,
// optional header row.

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "fpcert/errors.hpp"
#include "fpcert/scalar.hpp"
#include "fpcert/spaces.hpp"

namespace fpcert::io {

inline std::vector<std::string> split_fields(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(std::string(fpcert::detail::trim(field)));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

// A comma separated list of scalars; the empty string is the empty vector.
template <Scalar S>
CoordinateVector<S> parse_coefficients(const std::string& text) {
  if (fpcert::detail::trim(text).empty()) return {};
  std::vector<S> out;
  for (const auto& f : split_fields(text)) out.push_back(parse_scalar<S>(f));
  return CoordinateVector<S>(std::move(out));
}

template <Scalar S>
std::vector<CoordinateVector<S>> read_vectors_csv(std::istream& in) {
  std::vector<CoordinateVector<S>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (fpcert::detail::trim(line).empty() || fpcert::detail::trim(line).front() == '#') continue;
    try {
      rows.push_back(parse_coefficients<S>(line));
    } catch (const ParameterError& e) {
      if (rows.empty() && line_no == 1) continue;  // header
      throw ConfigError("csv line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (rows.empty()) throw ConfigError("csv contains no vectors");
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) throw ConfigError("csv rows have different lengths");
  }
  return rows;
}

template <Scalar S>
std::vector<CoordinateVector<S>> read_vectors_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open csv file '" + path + "'");
  return read_vectors_csv<S>(in);
}

}  // namespace fpcert::io
