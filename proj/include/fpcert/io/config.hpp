#pragma once

// Experiment configuration: an INI-style file of `key = value` lines grouped
// into sections. `#` or `;` starts a comment anywhere on a line.
//
//   seed = 7
//   arithmetic = float        # float | rational
//
//   [space]                   # optional when a builtin sequence fixes it
//   tag = l1
//
//   [sequence]
//   builtin = ell1_canonical  # or: csv = vectors.csv (relative to the config)
//   n = 64
//
//   [map.<name>]  ...  one section per map
//   [check.<name>] ... one section per check, run in file order
//   [orbit]        ... input of the `orbit` command
//
// Typed validation of the values happens when an experiment is built.

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cctype>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fpcert/errors.hpp"
#include "fpcert/scalar.hpp"

namespace fpcert::io {

struct Section {
  std::string name;  // without the "map." / "check." prefix
  std::vector<std::pair<std::string, std::string>> entries;

  std::optional<std::string> find(const std::string& key) const {
    for (const auto& [k, v] : entries) {
      if (k == key) return v;
    }
    return std::nullopt;
  }

  bool has(const std::string& key) const { return find(key).has_value(); }

  std::string require(const std::string& key, const std::string& where) const {
    auto v = find(key);
    if (!v || v->empty()) throw ConfigError(where + ": missing required key '" + key + "'");
    return *v;
  }
};

struct ExperimentConfig {
  std::filesystem::path base_dir;
  std::optional<std::uint64_t> seed;
  Arithmetic arithmetic = Arithmetic::Float;
  std::optional<Section> space;
  Section sequence;
  std::vector<Section> maps;
  std::vector<Section> checks;
  std::optional<Section> orbit;
};

inline Arithmetic parse_arithmetic(std::string text) {
  for (auto& ch : text) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  if (text == "float") return Arithmetic::Float;
  if (text == "rational") return Arithmetic::Rational;
  throw ConfigError("arithmetic must be float or rational, got '" + text + "'");
}

inline std::uint64_t parse_unsigned(const std::string& text, const std::string& what) {
  const auto t = fpcert::detail::trim(text);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string_view::npos) {
    throw ConfigError(what + " must be a nonnegative integer, got '" + text + "'");
  }
  try {
    return std::stoull(std::string(t));
  } catch (const std::out_of_range&) {
    throw ConfigError(what + " out of range: '" + text + "'");
  }
}

namespace detail {

inline std::string strip_comments(std::istream& in) {
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    out << line << '\n';
  }
  return out.str();
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in, std::filesystem::path base_dir = {}) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream cleaned(detail::strip_comments(in));
  try {
    pt::read_ini(cleaned, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }

  ExperimentConfig cfg;
  cfg.base_dir = std::move(base_dir);
  bool have_sequence = false;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      const std::string value(fpcert::detail::trim(node.data()));
      if (key == "seed") {
        cfg.seed = parse_unsigned(value, "seed");
      } else if (key == "arithmetic") {
        cfg.arithmetic = parse_arithmetic(value);
      } else {
        throw ConfigError("unknown top-level key '" + key + "'");
      }
      continue;
    }
    Section sec;
    for (const auto& [k, v] : node) {
      if (!v.empty()) throw ConfigError("nested keys are not supported in [" + key + "]");
      sec.entries.emplace_back(k, std::string(fpcert::detail::trim(v.data())));
    }
    auto prefixed = [&](const std::string& prefix) -> std::optional<std::string> {
      if (key.rfind(prefix, 0) != 0) return std::nullopt;
      std::string rest = key.substr(prefix.size());
      if (rest.empty()) throw ConfigError("section [" + key + "] needs a name");
      return rest;
    };
    if (key == "space") {
      sec.name = key;
      cfg.space = std::move(sec);
    } else if (key == "sequence") {
      sec.name = key;
      cfg.sequence = std::move(sec);
      have_sequence = true;
    } else if (key == "orbit") {
      sec.name = key;
      cfg.orbit = std::move(sec);
    } else if (auto name = prefixed("map.")) {
      sec.name = *name;
      cfg.maps.push_back(std::move(sec));
    } else if (auto name = prefixed("check.")) {
      sec.name = *name;
      cfg.checks.push_back(std::move(sec));
    } else {
      throw ConfigError("unknown section [" + key + "]");
    }
  }
  if (!have_sequence) throw ConfigError("missing [sequence] section");
  return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse_config(in, path.parent_path());
}

}  // namespace fpcert::io
