#pragma once

// JSON serialization of certificates. Doubles are written as JSON numbers
// (shortest round-trip form), rationals as "p/q" strings.

#include "json.hpp"

#include <string>

#include "fpcert/certificate.hpp"
#include "fpcert/scalar.hpp"

namespace fpcert::io {

using Json = nlohmann::ordered_json;

template <Scalar S>
Json scalar_json(const S& x) {
  if constexpr (is_exact_v<S>) {
    return to_string(x);
  } else {
    return x;
  }
}

template <Scalar S>
Json vector_json(const CoordinateVector<S>& v) {
  Json out = Json::array();
  for (const auto& x : v.entries()) out.push_back(scalar_json(x));
  return out;
}

inline Json mode_json(const SamplingMode& m) {
  return Json{{"label", m.label()},
              {"enumerated", m.enumerated},
              {"exhaustive", m.exhaustive},
              {"sampled", m.sampled},
              {"seed", m.seed}};
}

template <Scalar S>
Json certificate_json(const Certificate<S>& c) {
  Json constants = Json::object();
  for (const auto& [k, v] : c.constants) constants[k] = scalar_json(v);
  Json witness = Json::array();
  for (const auto& w : c.witnesses) {
    Json vectors = Json::array();
    for (const auto& v : w.vectors) vectors.push_back(vector_json(v));
    witness.push_back(Json{{"label", w.label}, {"vectors", std::move(vectors)}});
  }
  return Json{{"kind", c.kind},
              {"holds", c.holds},
              {"heuristic", c.heuristic},
              {"arithmetic", to_string(c.arithmetic)},
              {"mode", mode_json(c.mode)},
              {"evaluated", c.evaluated},
              {"excluded", c.excluded},
              {"violations", c.violations},
              {"constants", std::move(constants)},
              {"witness", std::move(witness)},
              {"notes", c.notes}};
}

}  // namespace fpcert::io
