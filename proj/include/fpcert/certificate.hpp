#pragma once

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpcert/errors.hpp"
#include "fpcert/sampling.hpp"
#include "fpcert/scalar.hpp"
#include "fpcert/spaces.hpp"

namespace fpcert {

template <Scalar S>
struct Witness {
  std::string label;
  std::vector<CoordinateVector<S>> vectors;
};

// Outcome of a quantitative inequality check: the constants it produced, whether
// the inequality held on every evaluated point, and the points attaining the
// reported extremes.
template <Scalar S>
struct Certificate {
  std::string kind;
  std::vector<std::pair<std::string, S>> constants;
  bool holds = false;
  // Some input (typically a basis-constant upper bound) is not certified.
  bool heuristic = false;
  std::vector<Witness<S>> witnesses;
  SamplingMode mode;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;
  std::size_t violations = 0;
  std::vector<std::string> notes;

  static constexpr Arithmetic arithmetic = arithmetic_of_v<S>;

  Certificate& set(std::string name, S value) {
    for (auto& [k, v] : constants) {
      if (k == name) {
        v = std::move(value);
        return *this;
      }
    }
    constants.emplace_back(std::move(name), std::move(value));
    return *this;
  }

  bool has(std::string_view name) const {
    return std::any_of(constants.begin(), constants.end(), [&](const auto& kv) { return kv.first == name; });
  }

  const S& constant(std::string_view name) const {
    for (const auto& [k, v] : constants) {
      if (k == name) return v;
    }
    throw IndexError("certificate '" + kind + "' has no constant '" + std::string(name) + "'");
  }

  const Witness<S>& witness(std::string_view label) const {
    for (const auto& w : witnesses) {
      if (w.label == label) return w;
    }
    throw IndexError("certificate '" + kind + "' has no witness '" + std::string(label) + "'");
  }
};

}  // namespace fpcert
