#pragma once

// Textual norm tags: sup (or c0), lin, l<p> / ell<p>, james<p>, and
// "summing" for the summing-basis norm of a coefficient vector.

#include <cctype>
#include <optional>
#include <string>

#include "fpcert/errors.hpp"
#include "fpcert/spaces.hpp"

namespace fpcert::io {

struct TagSpec {
  std::optional<NormTag> tag;  // empty for "summing"
  std::string text;

  bool summing() const { return !tag.has_value(); }

  template <Scalar S>
  S evaluate(const CoordinateVector<S>& v) const {
    return tag ? norm(v, *tag) : summing_basis_norm(v);
  }
};

namespace detail {

inline double parse_tag_exponent(const std::string& digits, const std::string& text) {
  std::size_t used = 0;
  double p = 0.0;
  try {
    p = std::stod(digits, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (digits.empty() || used != digits.size()) throw ConfigError("cannot parse norm tag '" + text + "'");
  return p;
}

}  // namespace detail

inline TagSpec parse_tag(const std::string& raw) {
  std::string text;
  for (char ch : raw) {
    if (!std::isspace(static_cast<unsigned char>(ch))) text += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  auto rest = [&](const std::string& prefix) -> std::optional<std::string> {
    if (text.rfind(prefix, 0) != 0) return std::nullopt;
    return text.substr(prefix.size());
  };
  try {
    if (text == "sup" || text == "c0") return {NormTag::sup(), text};
    if (text == "lin") return {NormTag::lin(), text};
    if (text == "summing") return {std::nullopt, text};
    if (auto p = rest("james")) return {NormTag::james(detail::parse_tag_exponent(*p, raw)), text};
    if (auto p = rest("ell")) return {NormTag::ell_p(detail::parse_tag_exponent(*p, raw)), text};
    if (auto p = rest("l")) return {NormTag::ell_p(detail::parse_tag_exponent(*p, raw)), text};
  } catch (const ParameterError& e) {
    throw ConfigError("norm tag '" + raw + "': " + e.what());
  }
  throw ConfigError("unknown norm tag '" + raw + "'");
}

}  // namespace fpcert::io
