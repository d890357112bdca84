#pragma once

// Affine self-maps of K = conv{x_n} written in barycentric coordinates t
// (x = sum t_n x_n, t_n >= 0, sum t_n = 1), their iterates, empirical
// bi-Lipschitz constants and orbit-separation estimates.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "fpcert/certificate.hpp"
#include "fpcert/errors.hpp"
#include "fpcert/sampling.hpp"
#include "fpcert/scalar.hpp"
#include "fpcert/sequences.hpp"
#include "fpcert/spaces.hpp"

namespace fpcert {

inline constexpr double kMassTolerance = 1e-12;

template <Scalar S>
class ConvexCoefficients {
 public:
  explicit ConvexCoefficients(CoordinateVector<S> t) : t_(std::move(t)) {
    if (t_.empty()) throw LengthError("convex coefficients must be nonempty");
    S total(0);
    for (const auto& x : t_.entries()) {
      if (x < 0) throw ParameterError("convex coefficients must be nonnegative");
      total += x;
    }
    if constexpr (is_exact_v<S>) {
      if (total != 1) throw ParameterError("convex coefficients must sum to 1");
    } else {
      if (std::fabs(total - 1.0) > kMassTolerance) throw ParameterError("convex coefficients must sum to 1");
    }
  }

  static ConvexCoefficients vertex(std::size_t n, std::size_t size) {
    return ConvexCoefficients(CoordinateVector<S>::delta(n, size));
  }

  static ConvexCoefficients uniform(std::size_t size) {
    if (size == 0) throw LengthError("convex coefficients must be nonempty");
    return ConvexCoefficients(CoordinateVector<S>(std::vector<S>(size, S(1) / S(static_cast<long>(size)))));
  }

  std::size_t size() const { return t_.size(); }
  const CoordinateVector<S>& coords() const { return t_; }
  const S& operator()(std::size_t n) const { return t_(n); }

  friend bool operator==(const ConvexCoefficients&, const ConvexCoefficients&) = default;

 private:
  CoordinateVector<S> t_;
};

// Positive weights alpha_n with (4 b kappa / a) * sum alpha_n <= theta.
template <Scalar S>
class AlphaSchedule {
 public:
  AlphaSchedule(std::vector<S> alphas, S theta, S a, S b, S kappa)
      : alphas_(std::move(alphas)), theta_(theta), a_(a), b_(b), kappa_(kappa) {
    if (!(theta_ > 0 && theta_ < 1)) throw ParameterError("theta out of (0,1)");
    if (!(a_ > 0 && a_ <= b_)) throw ParameterError("need 0 < a <= b");
    if (kappa_ < 1) throw ParameterError("basis constant must be >= 1");
    for (const auto& x : alphas_) {
      if (!(x > 0 && x < 1)) throw ParameterError("every alpha must lie in (0,1)");
    }
    if (!le_tol(constraint_value(), theta_, 1e-15)) throw ParameterError("schedule violates (4 b kappa / a) sum alpha <= theta");
  }

  std::size_t size() const { return alphas_.size(); }
  const std::vector<S>& alphas() const { return alphas_; }
  // 1-based.
  const S& alpha(std::size_t n) const { return alphas_.at(n - 1); }
  const S& theta() const { return theta_; }
  const S& a() const { return a_; }
  const S& b() const { return b_; }
  const S& kappa() const { return kappa_; }

  S sum() const {
    S total(0);
    for (const auto& x : alphas_) total += x;
    return total;
  }

  // (4 b kappa / a) * sum alpha_n
  S constraint_value() const { return S(4) * b_ * kappa_ / a_ * sum(); }

  AlphaSchedule scaled(const S& lambda) const {
    std::vector<S> out(alphas_);
    for (auto& x : out) x *= lambda;
    return AlphaSchedule(std::move(out), theta_, a_, b_, kappa_);
  }

 private:
  std::vector<S> alphas_;
  S theta_, a_, b_, kappa_;
};

// alpha_n = theta * a / (4 b kappa) * 2^-n, n = 1..count.
template <Scalar S>
AlphaSchedule<S> make_alpha_schedule(const S& theta, const S& a, const S& b, const S& kappa, std::size_t count) {
  if (!(theta > 0 && theta < 1)) throw ParameterError("theta out of (0,1)");
  if (!(a > 0 && a <= b)) throw ParameterError("need 0 < a <= b");
  if (kappa < 1) throw ParameterError("basis constant must be >= 1");
  const S base = theta * a / (S(4) * b * kappa);
  std::vector<S> alphas;
  alphas.reserve(count);
  for (std::size_t n = 1; n <= count; ++n) alphas.push_back(base * inv_pow2<S>(static_cast<unsigned>(n)));
  return AlphaSchedule<S>(std::move(alphas), theta, a, b, kappa);
}

enum class TruncationPolicy { Grow, FoldTail };

inline const char* to_string(TruncationPolicy p) { return p == TruncationPolicy::Grow ? "GROW" : "FOLD_TAIL"; }

template <Scalar S>
class AffineMapSpec {
 public:
  enum class Kind { DiagShift, RightShift, Bilateral, Geometric };

  static AffineMapSpec diag_shift(AlphaSchedule<S> schedule, TruncationPolicy policy = TruncationPolicy::Grow) {
    return AffineMapSpec(Kind::DiagShift, policy, std::move(schedule));
  }
  static AffineMapSpec right_shift(TruncationPolicy policy = TruncationPolicy::Grow) {
    return AffineMapSpec(Kind::RightShift, policy, std::nullopt);
  }
  static AffineMapSpec bilateral() { return AffineMapSpec(Kind::Bilateral, TruncationPolicy::FoldTail, std::nullopt); }
  static AffineMapSpec geometric(TruncationPolicy policy = TruncationPolicy::FoldTail) {
    return AffineMapSpec(Kind::Geometric, policy, std::nullopt);
  }

  Kind kind() const { return kind_; }
  TruncationPolicy policy() const { return policy_; }
  const AlphaSchedule<S>& schedule() const {
    if (!schedule_) throw PreconditionError("map has no alpha schedule");
    return *schedule_;
  }

  // Length of f(t) for an input of length n.
  std::size_t image_length(std::size_t n) const {
    if (kind_ == Kind::Bilateral) return n;
    return policy_ == TruncationPolicy::Grow ? n + 1 : n;
  }

  std::string name() const {
    switch (kind_) {
      case Kind::DiagShift: return "DIAG_SHIFT";
      case Kind::RightShift: return "RIGHT_SHIFT";
      case Kind::Bilateral: return "BILATERAL";
      case Kind::Geometric: return "GEOMETRIC";
    }
    return "?";
  }

 private:
  AffineMapSpec(Kind kind, TruncationPolicy policy, std::optional<AlphaSchedule<S>> schedule)
      : kind_(kind), policy_(policy), schedule_(std::move(schedule)) {}

  Kind kind_;
  TruncationPolicy policy_;
  std::optional<AlphaSchedule<S>> schedule_;
};

namespace detail {

// Target index (1-based) of coefficient n under the bilateral shift at even
// truncation N: t_2 -> x_1, t_{2k-1} -> x_{2k+1}, t_{2k} -> x_{2k-2}; the
// single out-of-range edge t_{N-1} -> x_{N+1} is closed onto x_N.
inline std::size_t bilateral_target(std::size_t n, std::size_t size) {
  if (n == 2) return 1;
  if (n % 2 == 1) return n + 2 <= size ? n + 2 : size;
  return n - 2;
}

// The linear extension of the map to arbitrary coefficient vectors.
template <Scalar S>
std::vector<S> apply_linear(const AffineMapSpec<S>& spec, const std::vector<S>& t) {
  using Kind = typename AffineMapSpec<S>::Kind;
  const std::size_t n = t.size();
  const std::size_t len = spec.image_length(n);
  std::vector<S> out(len, S(0));
  switch (spec.kind()) {
    case Kind::DiagShift: {
      const auto& sched = spec.schedule();
      const std::size_t needed = spec.policy() == TruncationPolicy::Grow ? n : n - 1;
      if (sched.size() < needed) throw LengthError("alpha schedule shorter than the coefficient vector");
      for (std::size_t i = 0; i < n; ++i) {
        if (t[i] == 0) continue;
        if (spec.policy() == TruncationPolicy::FoldTail && i + 1 == n) {
          out[i] += t[i];
          continue;
        }
        const S& alpha = sched.alphas()[i];
        out[i] += (S(1) - alpha) * t[i];
        out[i + 1] += alpha * t[i];
      }
      break;
    }
    case Kind::RightShift:
      for (std::size_t i = 0; i < n; ++i) out[std::min(i + 1, len - 1)] += t[i];
      break;
    case Kind::Bilateral:
      if (n % 2 != 0) throw TruncationError("bilateral map needs an even truncation length");
      for (std::size_t i = 1; i <= n; ++i) out[bilateral_target(i, n) - 1] += t[i - 1];
      break;
    case Kind::Geometric:
      // Source n sends 2^-j of its mass to n + j (j >= 1); everything at or past
      // the last output coordinate L lands on L.
      for (std::size_t i = 1; i <= n; ++i) {
        const S& ti = t[i - 1];
        if (ti == 0) continue;
        for (std::size_t m = i + 1; m < len; ++m) out[m - 1] += ti * inv_pow2<S>(static_cast<unsigned>(m - i));
        const std::size_t jmin = len > i ? len - i : 1;
        out[len - 1] += ti * inv_pow2<S>(static_cast<unsigned>(jmin - 1));
      }
      break;
  }
  return out;
}

}  // namespace detail

template <Scalar S>
ConvexCoefficients<S> apply_map(const AffineMapSpec<S>& spec, const ConvexCoefficients<S>& t) {
  return ConvexCoefficients<S>(CoordinateVector<S>(detail::apply_linear(spec, t.coords().values())));
}

// f^p(t); p = 0 returns t.
template <Scalar S>
ConvexCoefficients<S> iterate(const AffineMapSpec<S>& spec, ConvexCoefficients<S> t, std::size_t p) {
  for (std::size_t i = 0; i < p; ++i) t = apply_map(spec, t);
  return t;
}

// ||sum (f(t) - t)_n x_n||, the shorter coefficient vector zero-padded.
template <Scalar S>
S fixed_point_residual(const AffineMapSpec<S>& spec, const ConvexCoefficients<S>& t, const BasicSequence<S>& s) {
  const auto ft = apply_map(spec, t);
  const auto diff = ft.coords() - t.coords();
  if (diff.size() > s.size()) throw LengthError("sequence too short for the image of t");
  return span_norm(s, diff);
}

namespace detail {

// Dimension of K sampled by the estimators so that p_max iterates stay inside the sequence.
template <Scalar S>
std::size_t support_for(const AffineMapSpec<S>& spec, std::size_t m, std::size_t steps) {
  if (spec.kind() == AffineMapSpec<S>::Kind::Bilateral) return m - (m % 2);
  if (spec.policy() == TruncationPolicy::FoldTail) return m;
  if (steps >= m) throw ParameterError("sequence too short for the requested number of iterates");
  return m - steps;
}

// Pair k of the evaluation set: all vertex pairs first, then random simplex pairs.
template <Scalar S>
class PairSource {
 public:
  PairSource(std::size_t dim, const SamplingBudget& budget, bool ordered_with_diagonal)
      : dim_(dim), budget_(budget), diagonal_(ordered_with_diagonal) {
    if (dim_ <= budget_.vertex_pair_limit) vertex_pairs_ = diagonal_ ? dim_ * dim_ : dim_ * (dim_ - 1) / 2;
    for (std::size_t i = 1; i <= dim_ && vertex_pairs_ > 0 && !diagonal_; ++i) {
      for (std::size_t j = i + 1; j <= dim_; ++j) unordered_.emplace_back(i, j);
    }
  }

  std::size_t size() const { return vertex_pairs_ + budget_.samples; }

  SamplingMode mode() const { return SamplingMode{vertex_pairs_, vertex_pairs_ > 0, budget_.samples, budget_.seed}; }

  std::pair<ConvexCoefficients<S>, ConvexCoefficients<S>> at(std::size_t k) const {
    if (k < vertex_pairs_) {
      std::size_t i, j;
      if (diagonal_) {
        i = 1 + k / dim_;
        j = 1 + k % dim_;
      } else {
        std::tie(i, j) = unordered_[k];
      }
      return {ConvexCoefficients<S>::vertex(i, dim_), ConvexCoefficients<S>::vertex(j, dim_)};
    }
    auto rng = indexed_rng(budget_.seed, 0x70616972, k - vertex_pairs_);
    auto x = random_simplex_point<S>(rng, dim_);
    auto y = random_simplex_point<S>(rng, dim_);
    return {ConvexCoefficients<S>(std::move(x)), ConvexCoefficients<S>(std::move(y))};
  }

 private:
  std::size_t dim_;
  SamplingBudget budget_;
  bool diagonal_;
  std::size_t vertex_pairs_ = 0;
  std::vector<std::pair<std::size_t, std::size_t>> unordered_;
};

}  // namespace detail

// c1^ = min and c2^ = max of ||f^p t - f^p t'|| / ||t - t'|| over sampled pairs
// and p = 1..p_max; L^ = c2^/c1^. For DIAG_SHIFT the p = 1 ratios are also
// checked against [1 - theta, 1 + theta].
template <Scalar S>
Certificate<S> bilipschitz_estimate(const AffineMapSpec<S>& spec, const BasicSequence<S>& s,
                                    const SamplingBudget& pair_budget, std::size_t p_max = 1) {
  if (p_max < 1) throw ParameterError("p_max must be >= 1");
  const std::size_t dim = detail::support_for(spec, s.size(), p_max);
  if (dim < 2) throw ParameterError("need at least two coordinates to form pairs");
  detail::PairSource<S> pairs(dim, pair_budget, false);

  const bool diag = spec.kind() == AffineMapSpec<S>::Kind::DiagShift;
  std::optional<S> theta;
  if (diag) theta = spec.schedule().theta();

  std::vector<Extremes<S>> per_p(p_max);
  std::size_t violations = 0;
  std::size_t excluded = 0;
  // One pass per p keeps every scan deterministic and independent.
  for (std::size_t p = 1; p <= p_max; ++p) {
    RatioBounds<S> bounds;
    if (diag && p == 1) {
      bounds.lower = S(1) - *theta;
      bounds.upper = S(1) + *theta;
    }
    per_p[p - 1] = scan_extremes<S>(
        pairs.size(), pair_budget.threads,
        [&](std::size_t k) -> std::optional<S> {
          auto [t, u] = pairs.at(k);
          const S den = span_norm(s, t.coords() - u.coords());
          if (below_guard(den)) return std::nullopt;
          auto ft = detail::apply_linear(spec, (t.coords() - u.coords()).values());
          for (std::size_t i = 1; i < p; ++i) ft = detail::apply_linear(spec, ft);
          return S(span_norm(s, CoordinateVector<S>(std::move(ft))) / den);
        },
        bounds);
    violations += per_p[p - 1].violations;
    excluded += per_p[p - 1].excluded;
  }

  Certificate<S> c;
  c.kind = "bilipschitz";
  c.mode = pairs.mode();
  c.excluded = excluded;
  c.violations = violations;
  std::optional<S> c1, c2;
  std::size_t p_min = 0, p_maxr = 0;
  for (std::size_t p = 1; p <= p_max; ++p) {
    const auto& ex = per_p[p - 1];
    c.evaluated += ex.evaluated;
    if (!ex.min) continue;
    if (!c1 || *ex.min < *c1) {
      c1 = ex.min;
      p_min = p;
    }
    if (!c2 || *ex.max > *c2) {
      c2 = ex.max;
      p_maxr = p;
    }
  }
  if (!c1) return c;
  c.set("c1", *c1);
  c.set("c2", *c2);
  c.set("L_hat", *c2 / *c1);
  if (p_max > 1) {
    for (std::size_t p = 1; p <= p_max; ++p) {
      c.set("c1_p" + std::to_string(p), *per_p[p - 1].min);
      c.set("c2_p" + std::to_string(p), *per_p[p - 1].max);
    }
  }
  if (theta) {
    c.set("theta", *theta);
    c.set("bound_lower", S(1) - *theta);
    c.set("bound_upper", S(1) + *theta);
  }
  auto argmin = pairs.at(per_p[p_min - 1].argmin);
  auto argmax = pairs.at(per_p[p_maxr - 1].argmax);
  c.witnesses.push_back({"argmin_pair", {argmin.first.coords(), argmin.second.coords()}});
  c.witnesses.push_back({"argmax_pair", {argmax.first.coords(), argmax.second.coords()}});
  c.set("argmin_p", S(static_cast<long>(p_min)));
  c.set("argmax_p", S(static_cast<long>(p_maxr)));
  c.holds = *c1 > 0 && violations == 0;
  return c;
}

// Finite-horizon proxy for theta(f) = inf_{x,y} liminf_n ||x - f^n(y)||: for each
// pair the minimum of ||x - f^n y|| over the tail window n in [ceil(w/2), w].
// The proxy bounds each liminf from above only over the finite window.
template <Scalar S>
Certificate<S> theta_of_map(const AffineMapSpec<S>& spec, const BasicSequence<S>& s, const SamplingBudget& pair_budget,
                            std::size_t n_window, double tolerance = 1e-9) {
  if (n_window < 1) throw ParameterError("n_window must be >= 1");
  const std::size_t dim = detail::support_for(spec, s.size(), n_window);
  detail::PairSource<S> pairs(dim, pair_budget, true);
  const std::size_t from = (n_window + 1) / 2;

  auto window_min = [&](const ConvexCoefficients<S>& x, const ConvexCoefficients<S>& y) {
    ConvexCoefficients<S> orbit = y;
    std::optional<S> best;
    for (std::size_t n = 1; n <= n_window; ++n) {
      orbit = apply_map(spec, orbit);
      if (n < from) continue;
      const S d = span_norm(s, x.coords() - orbit.coords());
      if (!best || d < *best) best = d;
    }
    return *best;
  };
  const auto ex = scan_extremes<S>(pairs.size(), pair_budget.threads, [&](std::size_t k) -> std::optional<S> {
    auto [x, y] = pairs.at(k);
    return window_min(x, y);
  });

  Certificate<S> c;
  c.kind = "theta_of_map";
  c.mode = pairs.mode();
  c.evaluated = ex.evaluated;
  c.set("n_window", S(static_cast<long>(n_window)));
  c.set("window_start", S(static_cast<long>(from)));
  if (ex.min) {
    c.set("theta_hat", *ex.min);
    auto [x, y] = pairs.at(ex.argmin);
    c.witnesses.push_back({"argmin_pair", {x.coords(), y.coords()}});
    c.holds = to_double(*ex.min) > tolerance;
  }
  c.notes.push_back("tail-window minimum is a finite-horizon proxy for the liminf");
  if (c.holds) c.notes.push_back("theta(f) > 0 evidence");
  return c;
}

// min ||f(t) - t|| over the vertices, the barycenter and random simplex points.
template <Scalar S>
Certificate<S> fixed_point_residual_check(const AffineMapSpec<S>& spec, const BasicSequence<S>& s,
                                          const SamplingBudget& budget) {
  const std::size_t dim = detail::support_for(spec, s.size(), 1);
  const std::size_t fixed = dim + 1;
  auto point = [&](std::size_t k) {
    if (k < dim) return ConvexCoefficients<S>::vertex(k + 1, dim);
    if (k == dim) return ConvexCoefficients<S>::uniform(dim);
    auto rng = indexed_rng(budget.seed, 0x726573, k - fixed);
    return ConvexCoefficients<S>(random_simplex_point<S>(rng, dim));
  };
  const auto ex = scan_extremes<S>(fixed + budget.samples, budget.threads, [&](std::size_t k) -> std::optional<S> {
    return fixed_point_residual(spec, point(k), s);
  });
  Certificate<S> c;
  c.kind = "fixed_point_residual";
  c.mode = SamplingMode{fixed, false, budget.samples, budget.seed};
  c.evaluated = ex.evaluated;
  if (ex.min) {
    c.set("residual_min", *ex.min);
    c.set("residual_max", *ex.max);
    c.witnesses.push_back({"argmin", {point(ex.argmin).coords()}});
    // No guard: the smallest residuals are genuine, e.g. 2 alpha_M at the last vertex.
    c.holds = *ex.min > 0;
  }
  c.notes.push_back("map " + spec.name() + " (" + to_string(spec.policy()) + ")");
  return c;
}

// sum f(t) = 1 and f(l t + (1 - l) u) = l f(t) + (1 - l) f(u) on random
// (t, u, l); exact comparisons in rational arithmetic.
template <Scalar S>
Certificate<S> mass_affinity_check(const AffineMapSpec<S>& spec, std::size_t dim, const SamplingBudget& budget,
                                   double tol = 1e-12) {
  if (dim == 0) throw LengthError("dimension must be positive");
  if (spec.kind() == AffineMapSpec<S>::Kind::Bilateral && dim % 2 != 0) {
    throw TruncationError("bilateral map needs an even truncation length");
  }
  std::vector<S> mass_err(budget.samples, S(0));
  std::vector<S> aff_err(budget.samples, S(0));
  const auto ex = scan_extremes<S>(budget.samples, budget.threads, [&](std::size_t k) -> std::optional<S> {
    auto rng = indexed_rng(budget.seed, 0x616666, k);
    const ConvexCoefficients<S> t(random_simplex_point<S>(rng, dim));
    const ConvexCoefficients<S> u(random_simplex_point<S>(rng, dim));
    const S lambda = from_double<S>(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    const auto ft = detail::apply_linear(spec, t.coords().values());
    const auto fu = detail::apply_linear(spec, u.coords().values());
    const auto mix = t.coords().scaled(lambda) + u.coords().scaled(S(1) - lambda);
    const auto fmix = detail::apply_linear(spec, mix.values());
    S total(0), err(0);
    for (std::size_t i = 0; i < fmix.size(); ++i) {
      total += ft[i];
      err = std::max(err, S(abs_of(S(fmix[i] - (lambda * ft[i] + (S(1) - lambda) * fu[i])))));
    }
    mass_err[k] = abs_of(S(total - S(1)));
    aff_err[k] = err;
    return std::max(mass_err[k], aff_err[k]);
  });
  Certificate<S> c;
  c.kind = "mass_affinity";
  c.mode = SamplingMode{0, false, budget.samples, budget.seed};
  c.evaluated = ex.evaluated;
  S worst_mass(0), worst_aff(0);
  for (std::size_t k = 0; k < budget.samples; ++k) {
    worst_mass = std::max(worst_mass, mass_err[k]);
    worst_aff = std::max(worst_aff, aff_err[k]);
    if (!le_tol(std::max(mass_err[k], aff_err[k]), S(0), tol)) ++c.violations;
  }
  c.set("dimension", S(static_cast<long>(dim)));
  c.set("max_mass_error", worst_mass);
  c.set("max_affinity_error", worst_aff);
  c.holds = c.violations == 0;
  c.notes.push_back("map " + spec.name() + " (" + to_string(spec.policy()) + ")");
  return c;
}

// The bilateral shift permutes coordinates: sorted(f(t)) == sorted(t).
template <Scalar S>
Certificate<S> permutation_invariance_check(const AffineMapSpec<S>& spec, std::size_t dim,
                                            const SamplingBudget& budget) {
  if (spec.kind() != AffineMapSpec<S>::Kind::Bilateral) throw ParameterError("permutation check applies to BILATERAL");
  if (dim % 2 != 0) throw TruncationError("bilateral map needs an even truncation length");
  RatioBounds<S> exact;
  exact.upper = S(0);
  const auto ex = scan_extremes<S>(
      budget.samples, budget.threads,
      [&](std::size_t k) -> std::optional<S> {
        auto rng = indexed_rng(budget.seed, 0x6d756c, k);
        const ConvexCoefficients<S> t(random_simplex_point<S>(rng, dim));
        auto before = t.coords().values();
        auto after = apply_map(spec, t).coords().values();
        std::sort(before.begin(), before.end());
        std::sort(after.begin(), after.end());
        return S(before == after ? 0 : 1);
      },
      exact);
  Certificate<S> c;
  c.kind = "permutation_invariance";
  c.mode = SamplingMode{0, false, budget.samples, budget.seed};
  c.evaluated = ex.evaluated;
  c.violations = ex.violations;
  c.set("dimension", S(static_cast<long>(dim)));
  c.holds = ex.violations == 0;
  return c;
}

// A functional phi on the ambient space together with gamma = min_n phi(x_n),
// its dual norm and beta = gamma / ||phi||.
template <Scalar S>
struct SummingFunctional {
  CoordinateVector<S> phi;
  S gamma{0};
  S norm_phi{0};
  S beta{0};
};

template <Scalar S>
S dual_norm(const CoordinateVector<S>& phi, const NormTag& tag) {
  switch (tag.kind()) {
    case NormTag::Kind::Sup: return ell1_norm(phi);
    case NormTag::Kind::EllP:
      if (tag.p() == 1.0) return sup_norm(phi);
      if constexpr (is_exact_v<S>) {
        throw ParameterError("dual ell_q norm has no exact rational evaluation");
      } else {
        return ell_p_norm(phi, tag.p() / (tag.p() - 1.0));
      }
    default: throw ParameterError("dual norm not available for " + tag.name());
  }
}

template <Scalar S>
SummingFunctional<S> make_summing_functional(const CoordinateVector<S>& phi, const BasicSequence<S>& s) {
  if (phi.size() != s.ambient_length()) throw LengthError("functional length must match the ambient length");
  SummingFunctional<S> f{phi, S(0), S(0), S(0)};
  bool first = true;
  for (const auto& x : s.vectors()) {
    S value(0);
    for (std::size_t j = 0; j < x.size(); ++j) value += phi.values()[j] * x.values()[j];
    if (first || value < f.gamma) f.gamma = value;
    first = false;
  }
  f.norm_phi = dual_norm(phi, s.ambient());
  if (f.norm_phi == 0) throw ParameterError("functional is zero");
  f.beta = f.gamma / f.norm_phi;
  return f;
}

// (beta - eps (1 + 2 kappa)) / kappa, the analytic lower bound on theta(f) for
// the right shift; requires 0 < eps < beta / (1 + 2 kappa).
template <Scalar S>
S theta_lower_bound_rightshift(const BasicSequence<S>& s, const SummingFunctional<S>& f, const S& eps) {
  const S& kappa = s.kappa().upper;
  if (!(f.gamma > 0)) throw ParameterError("gamma must be positive");
  const S limit = f.beta / (S(1) + S(2) * kappa);
  if (!(eps > 0 && eps < limit)) throw ParameterError("eps out of (0, beta/(1 + 2 kappa))");
  return (f.beta - eps * (S(1) + S(2) * kappa)) / kappa;
}

}  // namespace fpcert
