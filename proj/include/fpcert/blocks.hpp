#pragma once

// Convex block sequences X_n = sum_{i in F_n} lambda^n_i x_i and the
// inequalities they are checked against: WUC constants, the two-sided
// summing-basis sandwich, uniform shift equivalence and the shift-equivalence
// conclusion for perturbed block sequences.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "fpcert/certificate.hpp"
#include "fpcert/errors.hpp"
#include "fpcert/fpmaps.hpp"
#include "fpcert/sampling.hpp"
#include "fpcert/sequences.hpp"

namespace fpcert {

template <Scalar S>
struct Block {
  std::vector<std::size_t> indices;  // 1-based, strictly increasing
  std::vector<S> weights;
};

template <Scalar S>
class ConvexBlockSpec {
 public:
  explicit ConvexBlockSpec(std::vector<Block<S>> blocks) : blocks_(std::move(blocks)) {
    std::size_t last = 0;
    for (const auto& blk : blocks_) {
      if (blk.indices.empty()) throw ParameterError("empty block");
      if (blk.indices.size() != blk.weights.size()) throw ParameterError("block weights do not match its indices");
      S total(0);
      for (std::size_t k = 0; k < blk.indices.size(); ++k) {
        if (blk.indices[k] <= last) throw ParameterError("blocks must be increasing: max F_n < min F_{n+1}");
        last = blk.indices[k];
        if (blk.weights[k] < 0) throw ParameterError("block weights must be nonnegative");
        total += blk.weights[k];
      }
      if constexpr (is_exact_v<S>) {
        if (total != 1) throw ParameterError("block weights must sum to 1");
      } else {
        if (std::fabs(total - 1.0) > kMassTolerance) throw ParameterError("block weights must sum to 1");
      }
    }
  }

  // F_n = {1}, {2}, ... with unit weights.
  static ConvexBlockSpec singletons(std::size_t count) {
    std::vector<Block<S>> blocks;
    for (std::size_t n = 1; n <= count; ++n) blocks.push_back({{n}, {S(1)}});
    return ConvexBlockSpec(std::move(blocks));
  }

  // Consecutive blocks of `width` indices with uniform weights.
  static ConvexBlockSpec uniform(std::size_t count, std::size_t width) {
    if (width == 0) throw ParameterError("block width must be positive");
    std::vector<Block<S>> blocks;
    for (std::size_t n = 0; n < count; ++n) {
      Block<S> blk;
      for (std::size_t k = 1; k <= width; ++k) {
        blk.indices.push_back(n * width + k);
        blk.weights.push_back(S(1) / S(static_cast<long>(width)));
      }
      blocks.push_back(std::move(blk));
    }
    return ConvexBlockSpec(std::move(blocks));
  }

  std::size_t size() const { return blocks_.size(); }
  const std::vector<Block<S>>& blocks() const { return blocks_; }
  std::size_t max_index() const { return blocks_.empty() ? 0 : blocks_.back().indices.back(); }

 private:
  std::vector<Block<S>> blocks_;
};

template <Scalar S>
std::vector<CoordinateVector<S>> convex_block_vectors(const BasicSequence<S>& s, const ConvexBlockSpec<S>& spec) {
  if (spec.size() == 0) throw ParameterError("block spec is empty");
  if (spec.max_index() > s.size()) throw IndexError("block index beyond the base sequence");
  std::vector<CoordinateVector<S>> out;
  for (const auto& blk : spec.blocks()) {
    auto v = CoordinateVector<S>::zeros(s.ambient_length());
    for (std::size_t k = 0; k < blk.indices.size(); ++k) v = v + s[blk.indices[k]].scaled(blk.weights[k]);
    out.push_back(std::move(v));
  }
  return out;
}

// The block sequence with a, b recomputed and kappa re-estimated.
template <Scalar S>
BasicSequence<S> build_convex_blocks(const BasicSequence<S>& s, const ConvexBlockSpec<S>& spec,
                                     const SamplingBudget& budget = {}) {
  return BasicSequence<S>::estimated(convex_block_vectors(s, spec), s.ambient(), budget);
}

// Barycentric coordinates over the base sequence of sum_n t_n X_n.
template <Scalar S>
ConvexCoefficients<S> pull_back_coefficients(const ConvexBlockSpec<S>& spec, const ConvexCoefficients<S>& t,
                                             std::size_t base_length) {
  if (t.size() != spec.size()) throw LengthError("one coefficient per block expected");
  if (spec.max_index() > base_length) throw IndexError("block index beyond the base length");
  std::vector<S> c(base_length, S(0));
  for (std::size_t n = 0; n < spec.size(); ++n) {
    const auto& blk = spec.blocks()[n];
    for (std::size_t k = 0; k < blk.indices.size(); ++k) c[blk.indices[k] - 1] += t(n + 1) * blk.weights[k];
  }
  return ConvexCoefficients<S>(CoordinateVector<S>(std::move(c)));
}

// c2^ = max ||sum t_i y_i|| / max_i |t_i|, a lower bound for the WUC constant.
template <Scalar S>
Certificate<S> wuc_constant(const BasicSequence<S>& ys, const SamplingBudget& budget = {}) {
  CoefficientSource<S> source(ys.size(), budget);
  const auto ex = scan_extremes<S>(source.size(), budget.threads, [&](std::size_t k) {
    const auto t = source.at(k);
    return guarded_ratio(span_norm(ys, t), sup_norm(t));
  });
  Certificate<S> c;
  c.kind = "wuc";
  c.mode = source.mode();
  c.evaluated = ex.evaluated;
  if (ex.max) {
    c.set("c2_hat", *ex.max);
    c.witnesses.push_back({"argmax", {source.at(ex.argmax)}});
    c.holds = true;
  }
  return c;
}

// c1 sigma(a) <= ||sum a_i X_i|| <= 2 c2 sigma(a), sigma(a) = max_k |sum_{i>=k} a_i|.
template <Scalar S>
Certificate<S> summing_equivalence_check(const BasicSequence<S>& bs, const S& c1, const S& c2,
                                         const SamplingBudget& budget = {}) {
  if (!(c1 > 0 && c2 > 0)) throw ParameterError("c1 and c2 must be positive");
  CoefficientSource<S> source(bs.size(), budget);
  RatioBounds<S> bounds{c1, S(2) * c2, 1e-9};
  const auto ex = scan_extremes<S>(
      source.size(), budget.threads,
      [&](std::size_t k) -> std::optional<S> {
        const auto a = source.at(k);
        const S sigma = summing_basis_norm(a);
        if (sigma == 0) return std::nullopt;
        return S(span_norm(bs, a) / sigma);
      },
      bounds);
  Certificate<S> c;
  c.kind = "summing_equivalence";
  c.mode = source.mode();
  c.evaluated = ex.evaluated;
  c.excluded = ex.excluded;
  c.violations = ex.violations;
  c.set("c1", c1);
  c.set("c2", c2);
  if (ex.min) {
    c.set("ratio_min", *ex.min);
    c.set("ratio_max", *ex.max);
    c.set("margin_lower", *ex.min - c1);
    c.set("margin_upper", S(2) * c2 - *ex.max);
    c.witnesses.push_back({"argmin", {source.at(ex.argmin)}});
    c.witnesses.push_back({"argmax", {source.at(ex.argmax)}});
  }
  c.holds = ex.violations == 0;
  return c;
}

namespace detail {

// Extremes of ||sum a_i x_{i+p}|| / ||sum a_i x_i|| over a in dimension M - p.
template <Scalar S>
std::pair<Extremes<S>, CoefficientSource<S>> shift_ratio_scan(const BasicSequence<S>& s, std::size_t p,
                                                              const SamplingBudget& budget, const RatioBounds<S>& bounds) {
  const std::size_t dim = s.size() - p;
  CoefficientSource<S> source(dim, budget);
  auto ex = scan_extremes<S>(
      source.size(), budget.threads,
      [&](std::size_t k) {
        const auto a = source.at(k);
        std::vector<S> shifted(s.size(), S(0));
        for (std::size_t i = 0; i < dim; ++i) shifted[i + p] = a.values()[i];
        return guarded_ratio(span_norm(s, CoordinateVector<S>(std::move(shifted))), span_norm(s, a));
      },
      bounds);
  return {std::move(ex), std::move(source)};
}

}  // namespace detail

// L^ = max_p max(r_max(p), 1/r_min(p)) for p = 1..p_max.
template <Scalar S>
Certificate<S> shift_equivalence_constants(const BasicSequence<S>& s, std::size_t p_max,
                                           const SamplingBudget& budget = {}) {
  if (p_max >= s.size()) throw IndexError("p_max must be smaller than the sequence length");
  Certificate<S> c;
  c.kind = "shift_equivalence";
  std::optional<S> worst;
  for (std::size_t p = 1; p <= p_max; ++p) {
    auto [ex, source] = detail::shift_ratio_scan(s, p, budget, {});
    if (!ex.min || !(*ex.min > 0)) continue;
    const S lp = std::max(*ex.max, S(S(1) / *ex.min));
    c.set("r_min_p" + std::to_string(p), *ex.min);
    c.set("r_max_p" + std::to_string(p), *ex.max);
    c.evaluated += ex.evaluated;
    c.excluded += ex.excluded;
    if (!worst || lp > *worst) {
      worst = lp;
      c.witnesses.clear();
      c.witnesses.push_back({"argmin", {source.at(ex.argmin)}});
      c.witnesses.push_back({"argmax", {source.at(ex.argmax)}});
      c.set("witness_p", S(static_cast<long>(p)));
    }
    const auto m = source.mode();
    c.mode.enumerated += m.enumerated;
    c.mode.sampled += m.sampled;
    c.mode.exhaustive = p == 1 ? m.exhaustive : (c.mode.exhaustive && m.exhaustive);
    c.mode.seed = budget.seed;
  }
  if (worst) {
    c.set("L_hat", *worst);
    c.holds = true;
  }
  return c;
}

// min(A / (4K(1+L)), A L / (4K(2+L))).
template <Scalar S>
S shift_perturbation_budget(const S& A, const S& kappa, const S& L) {
  if (!(A > 0)) throw ParameterError("A must be positive");
  if (kappa < 1) throw ParameterError("basis constant must be >= 1");
  if (!(L > 0)) throw ParameterError("L must be positive");
  const S first = A / (S(4) * kappa * (S(1) + L));
  const S second = A * L / (S(4) * kappa * (S(2) + L));
  return std::min(first, second);
}

enum class LowerConvention { Half, Symmetric, Custom };

inline const char* to_string(LowerConvention c) {
  switch (c) {
    case LowerConvention::Half: return "L/2";
    case LowerConvention::Symmetric: return "1/(2L)";
    case LowerConvention::Custom: return "custom";
  }
  return "?";
}

// lower_c ||sum a x|| <= ||sum a x_{i+p}|| <= L ||sum a x|| for p <= p_max.
// Both candidate lower constants L/2 and 1/(2L) are reported; `holds` uses the
// selected one.
template <Scalar S>
Certificate<S> shift_conclusion_check(const BasicSequence<S>& s, const S& L, std::size_t p_max,
                                        const SamplingBudget& budget = {},
                                        LowerConvention convention = LowerConvention::Half,
                                        std::optional<std::type_identity_t<S>> custom_lower = std::nullopt) {
  if (!(L > 0)) throw ParameterError("L must be positive");
  if (p_max >= s.size()) throw IndexError("p_max must be smaller than the sequence length");
  const S half = L / S(2);
  const S symmetric = S(1) / (S(2) * L);
  S lower;
  switch (convention) {
    case LowerConvention::Half: lower = half; break;
    case LowerConvention::Symmetric: lower = symmetric; break;
    case LowerConvention::Custom:
      if (!custom_lower) throw ParameterError("custom lower constant missing");
      lower = *custom_lower;
      break;
  }
  Certificate<S> c;
  c.kind = "shift_conclusion";
  c.set("L", L);
  c.set("lower_c", lower);
  c.set("lower_half", half);
  c.set("lower_symmetric", symmetric);
  std::optional<S> rmin, rmax;
  std::size_t upper_viol = 0, half_viol = 0, symmetric_viol = 0, selected_viol = 0;
  for (std::size_t p = 1; p <= p_max; ++p) {
    // One pass records every ratio so each lower convention is counted on the same points.
    const std::size_t dim = s.size() - p;
    CoefficientSource<S> source(dim, budget);
    std::vector<std::optional<S>> ratios(source.size());
    scan_extremes<S>(source.size(), budget.threads, [&](std::size_t k) {
      const auto a = source.at(k);
      std::vector<S> shifted(s.size(), S(0));
      for (std::size_t i = 0; i < dim; ++i) shifted[i + p] = a.values()[i];
      ratios[k] = guarded_ratio(span_norm(s, CoordinateVector<S>(std::move(shifted))), span_norm(s, a));
      return ratios[k];
    });
    Extremes<S> ex;
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      if (!ratios[k]) {
        ++ex.excluded;
        continue;
      }
      const S& r = *ratios[k];
      ex.add(k, r);
      if (!le_tol(r, L, 1e-9)) ++upper_viol;
      if (!le_tol(half, r, 1e-9)) ++half_viol;
      if (!le_tol(symmetric, r, 1e-9)) ++symmetric_viol;
      if (!le_tol(lower, r, 1e-9)) ++selected_viol;
    }
    c.evaluated += ex.evaluated;
    c.excluded += ex.excluded;
    if (!ex.min) continue;
    if (!rmin || *ex.min < *rmin) {
      rmin = ex.min;
      std::erase_if(c.witnesses, [](const auto& w) { return w.label == "argmin"; });
      c.witnesses.push_back({"argmin", {source.at(ex.argmin)}});
      c.set("argmin_p", S(static_cast<long>(p)));
    }
    if (!rmax || *ex.max > *rmax) {
      rmax = ex.max;
      std::erase_if(c.witnesses, [](const auto& w) { return w.label == "argmax"; });
      c.witnesses.push_back({"argmax", {source.at(ex.argmax)}});
      c.set("argmax_p", S(static_cast<long>(p)));
    }
    const auto m = source.mode();
    c.mode.enumerated += m.enumerated;
    c.mode.sampled += m.sampled;
    c.mode.exhaustive = p == 1 ? m.exhaustive : (c.mode.exhaustive && m.exhaustive);
    c.mode.seed = budget.seed;
  }
  if (rmin) {
    c.set("ratio_min", *rmin);
    c.set("ratio_max", *rmax);
    c.set("margin_upper", L - *rmax);
    c.set("margin_lower", *rmin - lower);
    c.set("margin_lower_half", *rmin - half);
    c.set("margin_lower_symmetric", *rmin - symmetric);
  }
  c.set("violations_upper", S(static_cast<long>(upper_viol)));
  c.set("violations_lower_half", S(static_cast<long>(half_viol)));
  c.set("violations_lower_symmetric", S(static_cast<long>(symmetric_viol)));
  c.violations = upper_viol + selected_viol;
  c.notes.push_back(std::string("lower constant convention: ") + to_string(convention));
  c.holds = rmin.has_value() && c.violations == 0;
  return c;
}

}  // namespace fpcert
