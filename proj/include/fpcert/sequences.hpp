#pragma once

// Finite basic sequences: head projections, basis-constant estimates and the
// domination / equivalence / wide-(s) / head-tail gap certificates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "fpcert/certificate.hpp"
#include "fpcert/errors.hpp"
#include "fpcert/sampling.hpp"
#include "fpcert/scalar.hpp"
#include "fpcert/spaces.hpp"

namespace fpcert {

// Denominators below this are treated as zero in floating point.
inline constexpr double kRatioGuard = 1e-12;

template <Scalar S>
bool below_guard(const S& x) {
  if constexpr (is_exact_v<S>) {
    return x == 0;
  } else {
    return x < kRatioGuard;
  }
}

template <Scalar S>
std::optional<S> guarded_ratio(const S& num, const S& den) {
  if (below_guard(den)) return std::nullopt;
  return S(num / den);
}

// Interval estimate of the basis constant at the available truncation.
// `lower` is always certified; `upper` only when `certified` is set.
template <Scalar S>
struct KappaInterval {
  S lower{1};
  S upper{1};
  bool certified = false;
  std::string source = "assumed";
};

namespace detail {

// Rank test by Gaussian elimination (exact for rationals, relative pivot tolerance for doubles).
template <Scalar S>
bool linearly_independent(const std::vector<CoordinateVector<S>>& rows) {
  if (rows.empty()) return true;
  const std::size_t m = rows.size();
  const std::size_t n = rows.front().size();
  if (m > n) return false;
  std::vector<std::vector<S>> a;
  a.reserve(m);
  S scale(0);
  for (const auto& r : rows) {
    a.push_back(r.values());
    scale = std::max(scale, sup_norm(r));
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < m; ++col) {
    std::size_t pivot = rank;
    for (std::size_t i = rank + 1; i < m; ++i) {
      if (abs_of(a[i][col]) > abs_of(a[pivot][col])) pivot = i;
    }
    const S piv = abs_of(a[pivot][col]);
    bool zero;
    if constexpr (is_exact_v<S>) {
      zero = piv == 0;
    } else {
      zero = piv <= 1e-12 * scale;
    }
    if (zero) continue;
    std::swap(a[pivot], a[rank]);
    for (std::size_t i = rank + 1; i < m; ++i) {
      const S factor = a[i][col] / a[rank][col];
      if (factor == 0) continue;
      for (std::size_t j = col; j < n; ++j) a[i][j] -= factor * a[rank][j];
    }
    ++rank;
  }
  return rank == m;
}

}  // namespace detail

// An ordered family x_1..x_M of vectors in a common ambient space.
template <Scalar S>
class BasicSequence {
 public:
  BasicSequence(std::vector<CoordinateVector<S>> vectors, NormTag ambient, KappaInterval<S> kappa)
      : vectors_(std::move(vectors)), ambient_(ambient), kappa_(std::move(kappa)) {
    if (vectors_.empty()) throw LengthError("a basic sequence needs at least one vector");
    const std::size_t n = vectors_.front().size();
    for (const auto& v : vectors_) {
      if (v.size() != n) throw LengthError("basic sequence vectors must share the ambient length");
    }
    a_ = norm(vectors_.front(), ambient_);
    b_ = a_;
    for (const auto& v : vectors_) {
      const S nv = norm(v, ambient_);
      a_ = std::min(a_, nv);
      b_ = std::max(b_, nv);
    }
    if (!(a_ > 0)) throw DependenceError("basic sequence contains a zero vector");
    if (!detail::linearly_independent(vectors_)) throw DependenceError("basic sequence vectors are linearly dependent");
    if (kappa_.lower < 1 || kappa_.upper < kappa_.lower) {
      throw ParameterError("basis constant interval must satisfy 1 <= lower <= upper");
    }
  }

  // Builds the sequence and estimates its basis constant.
  static BasicSequence estimated(std::vector<CoordinateVector<S>> vectors, NormTag ambient,
                                 const SamplingBudget& budget = {});

  std::size_t size() const { return vectors_.size(); }
  std::size_t ambient_length() const { return vectors_.front().size(); }
  const NormTag& ambient() const { return ambient_; }
  const std::vector<CoordinateVector<S>>& vectors() const { return vectors_; }
  // 1-based.
  const CoordinateVector<S>& operator[](std::size_t n) const { return vectors_.at(n - 1); }

  const S& a() const { return a_; }
  const S& b() const { return b_; }
  const KappaInterval<S>& kappa() const { return kappa_; }

  BasicSequence with_kappa(KappaInterval<S> kappa) const {
    return BasicSequence(vectors_, ambient_, std::move(kappa));
  }

  // The subsequence x_{n_1}, x_{n_2}, ... (1-based, strictly increasing indices).
  BasicSequence subsequence(const std::vector<std::size_t>& indices, KappaInterval<S> kappa) const {
    std::vector<CoordinateVector<S>> out;
    std::size_t last = 0;
    for (std::size_t i : indices) {
      if (i <= last || i > size()) throw IndexError("subsequence indices must be increasing and in range");
      out.push_back(vectors_[i - 1]);
      last = i;
    }
    return BasicSequence(std::move(out), ambient_, std::move(kappa));
  }

  BasicSequence scaled(const S& lambda) const {
    std::vector<CoordinateVector<S>> out;
    for (const auto& v : vectors_) out.push_back(v.scaled(lambda));
    return BasicSequence(std::move(out), ambient_, kappa_);
  }

 private:
  std::vector<CoordinateVector<S>> vectors_;
  NormTag ambient_;
  KappaInterval<S> kappa_;
  S a_{0};
  S b_{0};
};

// Coefficients of an element of the span, read against a BasicSequence.
template <Scalar S>
struct SpanElement {
  CoordinateVector<S> coeffs;
};

// sum_i a_i x_i in ambient coordinates; `a` may be shorter than the sequence.
template <Scalar S>
CoordinateVector<S> synthesize(const BasicSequence<S>& s, const CoordinateVector<S>& a) {
  if (a.size() > s.size()) throw LengthError("coefficient vector longer than the sequence");
  std::vector<S> out(s.ambient_length(), S(0));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const S& ai = a.values()[i];
    if (ai == 0) continue;
    const auto& x = s.vectors()[i].values();
    for (std::size_t j = 0; j < out.size(); ++j) {
      if (x[j] != 0) out[j] += ai * x[j];
    }
  }
  return CoordinateVector<S>(std::move(out));
}

template <Scalar S>
S span_norm(const BasicSequence<S>& s, const CoordinateVector<S>& a) {
  return norm(synthesize(s, a), s.ambient());
}

template <Scalar S>
SpanElement<S> head_projection(const BasicSequence<S>& s, const SpanElement<S>& e, std::size_t n) {
  if (e.coeffs.size() > s.size()) throw LengthError("span element longer than the sequence");
  if (n > e.coeffs.size()) throw IndexError("projection index exceeds the span element length");
  std::vector<S> out(e.coeffs.values());
  for (std::size_t i = n; i < out.size(); ++i) out[i] = S(0);
  return {CoordinateVector<S>(std::move(out))};
}

// R_n e = e - P_n e.
template <Scalar S>
SpanElement<S> tail_remainder(const BasicSequence<S>& s, const SpanElement<S>& e, std::size_t n) {
  return {e.coeffs - head_projection(s, e, n).coeffs};
}

template <Scalar S>
struct BasisConstantEstimate {
  KappaInterval<S> kappa;
  CoordinateVector<S> witness;  // coefficients attaining `lower`
  std::size_t witness_n = 0;    // projection index attaining `lower`
  CoordinateVector<S> refined;  // local-search point attaining `upper`
  SamplingMode mode;
};

namespace detail {

// max_n ||P_n e|| / ||e|| for e = sum a_i x_i; n = M contributes 1.
template <Scalar S>
S projection_ratio(const BasicSequence<S>& s, const CoordinateVector<S>& a, std::size_t* arg_n = nullptr) {
  const std::size_t m = a.size();
  std::vector<S> partial(s.ambient_length(), S(0));
  S best(0);
  std::size_t best_n = m;
  for (std::size_t n = 1; n <= m; ++n) {
    const S& an = a.values()[n - 1];
    if (an != 0) {
      const auto& x = s.vectors()[n - 1].values();
      for (std::size_t j = 0; j < partial.size(); ++j) partial[j] += an * x[j];
    }
    if (n == m) break;
    const S head = norm(CoordinateVector<S>(partial), s.ambient());
    if (head > best) {
      best = head;
      best_n = n;
    }
  }
  const S full = norm(CoordinateVector<S>(partial), s.ambient());
  if (below_guard(full)) throw DependenceError("nonzero coefficients synthesize a (near) zero vector");
  S ratio = best / full;
  if (ratio < 1) {
    ratio = S(1);
    best_n = m;
  }
  if (arg_n) *arg_n = best_n;
  return ratio;
}

// Pattern search that climbs projection_ratio from `start`.
template <Scalar S>
std::pair<S, CoordinateVector<S>> refine_projection_ratio(const BasicSequence<S>& s, CoordinateVector<S> start,
                                                          std::size_t max_evals) {
  S best = projection_ratio(s, start);
  std::vector<S> a = start.values();
  const S scale = sup_norm(start);
  std::size_t evals = 1;
  for (unsigned k = 1; k <= 14 && evals < max_evals; ++k) {
    const S step = scale * inv_pow2<S>(k);
    bool improved = true;
    while (improved && evals < max_evals) {
      improved = false;
      for (std::size_t i = 0; i < a.size() && evals < max_evals; ++i) {
        for (int dir : {1, -1}) {
          std::vector<S> trial = a;
          trial[i] += dir > 0 ? step : S(-step);
          CoordinateVector<S> t(trial);
          if (t.is_zero()) continue;
          ++evals;
          S r;
          try {
            r = projection_ratio(s, t);
          } catch (const DependenceError&) {
            continue;
          }
          if (r > best) {
            best = r;
            a = std::move(trial);
            improved = true;
            break;
          }
        }
      }
    }
  }
  return {best, CoordinateVector<S>(std::move(a))};
}

}  // namespace detail

// Estimate of sup_n ||P_n|| at truncation M. `lower` is the largest ratio over
// the enumerated/sampled set (all {-1,0,1} patterns for M <= exhaustive_limit,
// all +-1 patterns for M <= 12); `upper` comes from local-search refinement and
// is not certified.
template <Scalar S>
BasisConstantEstimate<S> basis_constant(const BasicSequence<S>& s, const SamplingBudget& budget = {},
                                        std::size_t local_search_evals = 4000) {
  const std::size_t m = s.size();
  CoefficientSource<S> source(m, budget);
  std::size_t binary = 0;
  if (m > budget.exhaustive_limit && m <= 12) binary = std::size_t{1} << m;

  auto at = [&](std::size_t k) -> CoordinateVector<S> {
    if (k < binary) {
      std::vector<S> a(m);
      for (std::size_t i = 0; i < m; ++i) a[i] = ((k >> i) & 1u) ? S(1) : S(-1);
      return CoordinateVector<S>(std::move(a));
    }
    return source.at(k - binary);
  };
  const std::size_t total = binary + source.size();
  const auto ex = scan_extremes<S>(total, budget.threads,
                                   [&](std::size_t k) -> std::optional<S> { return detail::projection_ratio(s, at(k)); });

  BasisConstantEstimate<S> out;
  out.mode = source.mode();
  out.mode.enumerated += binary;
  out.mode.exhaustive = out.mode.exhaustive || binary > 0;
  if (!ex.max) {
    out.kappa = {S(1), S(1), false, "empty"};
    out.witness = CoordinateVector<S>::delta(1, m);
    out.witness_n = m;
    out.refined = out.witness;
    return out;
  }
  out.witness = at(ex.argmax);
  detail::projection_ratio(s, out.witness, &out.witness_n);
  auto [refined_value, refined] = detail::refine_projection_ratio(s, out.witness, local_search_evals);
  out.kappa = {*ex.max, std::max(*ex.max, refined_value), false, "estimated"};
  out.refined = std::move(refined);
  return out;
}

template <Scalar S>
BasicSequence<S> BasicSequence<S>::estimated(std::vector<CoordinateVector<S>> vectors, NormTag ambient,
                                             const SamplingBudget& budget) {
  BasicSequence<S> provisional(std::move(vectors), ambient, KappaInterval<S>{});
  auto est = basis_constant(provisional, budget);
  return provisional.with_kappa(est.kappa);
}

// ----------------------------------------------------------------------------
// Builtin families. Canonical bases of l_p, c0 and Lin's l_1 are monotone and
// the J_p summing basis (in summing coordinates) is monotone too, so their
// basis constant is exactly 1; the c0 summing basis has basis constant 2.

template <Scalar S>
std::vector<CoordinateVector<S>> unit_vectors(std::size_t m, std::size_t ambient_length, std::size_t offset = 0) {
  if (ambient_length < m + offset) throw LengthError("ambient length too small for the requested unit vectors");
  std::vector<CoordinateVector<S>> out;
  for (std::size_t n = 1; n <= m; ++n) out.push_back(CoordinateVector<S>::delta(n + offset, ambient_length));
  return out;
}

template <Scalar S>
KappaInterval<S> exact_kappa(S value, std::string source) {
  return {value, value, true, std::move(source)};
}

template <Scalar S>
BasicSequence<S> ell1_canonical(std::size_t m, std::size_t ambient_length = 0) {
  return {unit_vectors<S>(m, ambient_length ? ambient_length : m), NormTag::ell_p(1.0),
          exact_kappa<S>(S(1), "monotone basis")};
}

template <Scalar S>
BasicSequence<S> c0_canonical(std::size_t m, std::size_t ambient_length = 0) {
  return {unit_vectors<S>(m, ambient_length ? ambient_length : m), NormTag::sup(), exact_kappa<S>(S(1), "monotone basis")};
}

template <Scalar S>
BasicSequence<S> lin_ell1_canonical(std::size_t m, std::size_t ambient_length = 0) {
  return {unit_vectors<S>(m, ambient_length ? ambient_length : m), NormTag::lin(), exact_kappa<S>(S(1), "monotone basis")};
}

// s_n = e_1 + ... + e_n in c0.
template <Scalar S>
BasicSequence<S> summing_c0(std::size_t m, std::size_t ambient_length = 0) {
  const std::size_t len = ambient_length ? ambient_length : m;
  if (len < m) throw LengthError("ambient length too small for the summing basis");
  std::vector<CoordinateVector<S>> out;
  for (std::size_t n = 1; n <= m; ++n) {
    std::vector<S> v(len, S(0));
    for (std::size_t j = 0; j < n; ++j) v[j] = S(1);
    out.emplace_back(std::move(v));
  }
  return {std::move(out), NormTag::sup(), exact_kappa<S>(S(2), "summing basis of c0")};
}

// Summing basis (u_n) of J_p, represented in summing coordinates (u_n = unit vector).
inline BasicSequence<double> james_summing(std::size_t m, double p) {
  return {unit_vectors<double>(m, m), NormTag::james(p), exact_kappa<double>(1.0, "monotone basis")};
}

// ----------------------------------------------------------------------------
// Certificates.

namespace detail {

template <Scalar S>
void require_same_length(const BasicSequence<S>& xs, const BasicSequence<S>& ys) {
  if (xs.size() != ys.size()) throw LengthError("sequences must have the same number of vectors");
}

}  // namespace detail

// Lower bound L^ for the best constant L with ||sum a y|| <= L ||sum a x||.
// When `claimed` is given, points where the ratio exceeds it count as violations.
template <Scalar S>
Certificate<S> domination_constant(const BasicSequence<S>& xs, const BasicSequence<S>& ys,
                                   const SamplingBudget& budget = {}, std::optional<std::type_identity_t<S>> claimed = std::nullopt) {
  detail::require_same_length(xs, ys);
  CoefficientSource<S> source(xs.size(), budget);
  RatioBounds<S> bounds;
  bounds.upper = claimed;
  const auto ex = scan_extremes<S>(
      source.size(), budget.threads,
      [&](std::size_t k) {
        const auto a = source.at(k);
        return guarded_ratio(span_norm(ys, a), span_norm(xs, a));
      },
      bounds);
  Certificate<S> c;
  c.kind = "domination";
  c.mode = source.mode();
  c.evaluated = ex.evaluated;
  c.excluded = ex.excluded;
  c.violations = ex.violations;
  if (ex.max) {
    c.set("L_hat", *ex.max);
    c.witnesses.push_back({"argmax", {source.at(ex.argmax)}});
  }
  if (claimed) c.set("L_claimed", *claimed);
  if (ex.excluded > 0) c.notes.push_back("near-dependent coefficient vectors excluded: " + std::to_string(ex.excluded));
  c.holds = ex.max.has_value() && ex.violations == 0;
  return c;
}

// Extremes of ||sum a y|| / ||sum a x||; L = max(r_max, 1/r_min) is the smallest
// constant for which the two-sided equivalence holds on the evaluated set.
template <Scalar S>
Certificate<S> equivalence_constants(const BasicSequence<S>& xs, const BasicSequence<S>& ys,
                                     const SamplingBudget& budget = {}) {
  detail::require_same_length(xs, ys);
  CoefficientSource<S> source(xs.size(), budget);
  const auto ex = scan_extremes<S>(source.size(), budget.threads, [&](std::size_t k) {
    const auto a = source.at(k);
    return guarded_ratio(span_norm(ys, a), span_norm(xs, a));
  });
  Certificate<S> c;
  c.kind = "equivalence";
  c.mode = source.mode();
  c.evaluated = ex.evaluated;
  c.excluded = ex.excluded;
  if (ex.max && ex.min && *ex.min > 0) {
    c.set("r_min", *ex.min);
    c.set("r_max", *ex.max);
    c.set("L", std::max(*ex.max, S(S(1) / *ex.min)));
    c.witnesses.push_back({"argmin", {source.at(ex.argmin)}});
    c.witnesses.push_back({"argmax", {source.at(ex.argmax)}});
    c.holds = true;
  }
  return c;
}

// d^ = min ||sum a x|| / ||sum a s||_c0 over evaluated a: an upper bound on the
// best wide-(s) constant. Points with zero summing norm impose no constraint.
template <Scalar S>
Certificate<S> wide_s_certificate(const BasicSequence<S>& s, const SamplingBudget& budget = {}) {
  CoefficientSource<S> source(s.size(), budget);
  const auto ex = scan_extremes<S>(source.size(), budget.threads, [&](std::size_t k) -> std::optional<S> {
    const auto a = source.at(k);
    const S sigma = summing_basis_norm(a);
    if (sigma == 0) return std::nullopt;
    return S(span_norm(s, a) / sigma);
  });
  Certificate<S> c;
  c.kind = "wide_s";
  c.mode = source.mode();
  c.evaluated = ex.evaluated;
  c.excluded = ex.excluded;
  if (ex.min) {
    c.set("d_hat", *ex.min);
    c.witnesses.push_back({"argmin", {source.at(ex.argmin)}});
    c.holds = *ex.min > 0;
  }
  c.notes.push_back("d_hat is an upper bound on the optimal constant at truncation M=" + std::to_string(s.size()));
  return c;
}

// Samples heads x in span(x_1..x_n) with ||x|| >= a and tails y in
// span(x_{n+1}..x_M) and checks ||x - y|| >= a / kappa.upper.
template <Scalar S>
Certificate<S> gap_bound_check(const BasicSequence<S>& s, const SamplingBudget& budget = {}) {
  const std::size_t m = s.size();
  const S bound = s.a() / s.kappa().upper;
  Certificate<S> c;
  c.kind = "gap_bound";
  c.heuristic = !s.kappa().certified;
  c.set("a", s.a());
  c.set("kappa_upper", s.kappa().upper);
  c.set("bound", bound);
  if (m < 2) {
    c.holds = true;
    c.mode = SamplingMode{0, true, 0, budget.seed};
    c.notes.push_back("no tail: vacuous");
    return c;
  }
  const std::size_t count = budget.samples;
  auto make = [&](std::size_t k) {
    auto rng = indexed_rng(budget.seed, 0x676170, k);
    const std::size_t n = 1 + k % (m - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto head = random_sphere_point<S>(rng, n);
    auto tail = random_sphere_point<S>(rng, m - n);
    const S head_norm = span_norm(s, head);
    const S tail_norm = span_norm(s, tail);
    const S head_scale = s.a() * from_double<S>(1.0 + unit(rng)) / head_norm;
    const S tail_scale = tail_norm == 0 ? S(0) : S(s.a() * from_double<S>(3.0 * unit(rng)) / tail_norm);
    std::vector<S> coeffs(m, S(0));
    for (std::size_t i = 0; i < n; ++i) coeffs[i] = head.values()[i] * head_scale;
    for (std::size_t i = n; i < m; ++i) coeffs[i] = -tail.values()[i - n] * tail_scale;
    return std::make_pair(CoordinateVector<S>(std::move(coeffs)), n);
  };
  RatioBounds<S> bounds;
  bounds.lower = bound;
  const auto ex = scan_extremes<S>(
      count, budget.threads, [&](std::size_t k) -> std::optional<S> { return span_norm(s, make(k).first); }, bounds);
  c.mode = SamplingMode{0, false, count, budget.seed};
  c.evaluated = ex.evaluated;
  c.violations = ex.violations;
  if (ex.min) {
    c.set("min_gap", *ex.min);
    auto [w, n] = make(ex.argmin);
    c.witnesses.push_back({"x_minus_y", {w}});
    c.set("witness_split", S(static_cast<long>(n)));
  }
  c.holds = ex.violations == 0;
  return c;
}

}  // namespace fpcert
