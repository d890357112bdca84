#pragma once

// Small-perturbation pipeline: z_n = (1 - alpha_n) x_n + alpha_n x_{n+1}, the
// perturbation sum theta = 2 kappa sum ||x_n - z_n|| / ||x_n||, and checks of
// (1 - theta) ||sum t x|| <= ||sum t z|| <= (1 + theta) ||sum t x||.

#include <string>
#include <vector>

#include "fpcert/certificate.hpp"
#include "fpcert/errors.hpp"
#include "fpcert/fpmaps.hpp"
#include "fpcert/sampling.hpp"
#include "fpcert/sequences.hpp"

namespace fpcert {

template <Scalar S>
struct PerturbedSequence {
  BasicSequence<S> base;
  std::vector<CoordinateVector<S>> z;
};

template <Scalar S>
PerturbedSequence<S> perturb_toward_next(const BasicSequence<S>& s, const AlphaSchedule<S>& alpha) {
  if (alpha.size() + 1 > s.size()) throw LengthError("alpha schedule must be shorter than the sequence");
  std::vector<CoordinateVector<S>> z;
  z.reserve(alpha.size());
  for (std::size_t n = 1; n <= alpha.size(); ++n) {
    const S& an = alpha.alpha(n);
    z.push_back(s[n].scaled(S(1) - an) + s[n + 1].scaled(an));
  }
  return {s, std::move(z)};
}

// The sequence z as it pairs with coefficients: the first len(z) vectors of x
// replaced one for one.
template <Scalar S>
CoordinateVector<S> synthesize_perturbed(const PerturbedSequence<S>& z, const CoordinateVector<S>& t) {
  if (t.size() > z.z.size()) throw LengthError("coefficient vector longer than the perturbed sequence");
  std::vector<S> out(z.base.ambient_length(), S(0));
  for (std::size_t i = 0; i < t.size(); ++i) {
    const S& ti = t.values()[i];
    if (ti == 0) continue;
    const auto& v = z.z[i].values();
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += ti * v[j];
  }
  return CoordinateVector<S>(std::move(out));
}

template <Scalar S>
struct PspTheta {
  S value{0};        // with kappa.upper
  S lower_value{0};  // with kappa.lower
  S relative_sum{0};  // sum ||x_n - z_n|| / ||x_n||
  bool valid = false;
  bool heuristic = false;
};

template <Scalar S>
PspTheta<S> psp_theta(const BasicSequence<S>& s, const PerturbedSequence<S>& z) {
  S sum(0);
  for (std::size_t n = 1; n <= z.z.size(); ++n) {
    const S xn = norm(s[n], s.ambient());
    if (!(xn > 0)) throw PreconditionError("sequence is not seminormalized");
    sum += norm(s[n] - z.z[n - 1], s.ambient()) / xn;
  }
  PspTheta<S> out;
  out.relative_sum = sum;
  out.value = S(2) * s.kappa().upper * sum;
  out.lower_value = S(2) * s.kappa().lower * sum;
  out.valid = out.value < 1;
  out.heuristic = !s.kappa().certified;
  return out;
}

template <Scalar S>
Certificate<S> psp_equivalence_check(const BasicSequence<S>& s, const PerturbedSequence<S>& z,
                                     const PspTheta<S>& theta, const SamplingBudget& budget = {}) {
  if (!(theta.value < 1)) throw PreconditionError("perturbation sum theta must be < 1");
  const std::size_t dim = z.z.size();
  Certificate<S> c;
  c.kind = "psp_equivalence";
  c.heuristic = theta.heuristic;
  c.set("theta", theta.value);
  c.set("bound_lower", S(1) - theta.value);
  c.set("bound_upper", S(1) + theta.value);
  if (dim == 0) {
    c.holds = true;
    c.mode = SamplingMode{0, true, 0, budget.seed};
    c.notes.push_back("empty perturbation: vacuous");
    return c;
  }
  CoefficientSource<S> source(dim, budget);
  RatioBounds<S> bounds{S(1) - theta.value, S(1) + theta.value, 1e-9};
  const auto ex = scan_extremes<S>(
      source.size(), budget.threads,
      [&](std::size_t k) {
        const auto t = source.at(k);
        return guarded_ratio(norm(synthesize_perturbed(z, t), s.ambient()), span_norm(s, t));
      },
      bounds);
  c.mode = source.mode();
  c.evaluated = ex.evaluated;
  c.excluded = ex.excluded;
  c.violations = ex.violations;
  if (ex.min) {
    c.set("ratio_min", *ex.min);
    c.set("ratio_max", *ex.max);
    c.set("margin_lower", *ex.min - (S(1) - theta.value));
    c.set("margin_upper", (S(1) + theta.value) - *ex.max);
    c.witnesses.push_back({"argmin", {source.at(ex.argmin)}});
    c.witnesses.push_back({"argmax", {source.at(ex.argmax)}});
  }
  if (theta.heuristic) c.notes.push_back("basis constant upper bound is heuristic");
  c.holds = ex.violations == 0;
  return c;
}

// Checks each link of
//   2K sum ||x_n - z_n||/||x_n||  <=  2K sum 2 b alpha_n / a  =  (4 b K / a) sum alpha_n  <=  theta  <  1
// with a, b, K taken from the schedule, plus that the schedule's constants are
// valid for s (a <= min ||x_n||, b >= max ||x_n||, K >= kappa.upper).
template <Scalar S>
Certificate<S> perturbation_chain(const BasicSequence<S>& s, const AlphaSchedule<S>& alpha, double tol = 1e-12) {
  const auto z = perturb_toward_next(s, alpha);
  const S& a = alpha.a();
  const S& b = alpha.b();
  const S& kappa = alpha.kappa();
  S rel(0);
  S weighted(0);
  bool steps_bounded = true;
  for (std::size_t n = 1; n <= alpha.size(); ++n) {
    rel += norm(s[n] - z.z[n - 1], s.ambient()) / norm(s[n], s.ambient());
    weighted += S(2) * b * alpha.alpha(n) / a;
    if (!le_tol(S(norm(s[n] - s[n + 1], s.ambient())), S(S(2) * b), tol)) steps_bounded = false;
  }
  const S q1 = S(2) * kappa * rel;
  const S q2 = S(2) * kappa * weighted;
  const S q3 = alpha.constraint_value();
  const S& q4 = alpha.theta();

  Certificate<S> c;
  c.kind = "perturbation_chain";
  c.mode = SamplingMode{alpha.size(), true, 0, 0};
  c.set("perturbation_sum", q1);
  c.set("weighted_alpha_sum", q2);
  c.set("constraint_value", q3);
  c.set("theta", q4);

  const bool link1 = le_tol(q1, q2, tol);
  bool link2;
  if constexpr (is_exact_v<S>) {
    link2 = q2 == q3;
  } else {
    link2 = std::fabs(q2 - q3) <= tol * std::max(1.0, std::fabs(q3));
  }
  const bool link3 = le_tol(q3, q4, tol);
  const bool link4 = q4 < 1;
  const bool consts = le_tol(a, s.a(), tol) && le_tol(s.b(), b, tol) && le_tol(s.kappa().upper, kappa, tol);
  c.set("link_sum_le_weighted", S(link1 ? 1 : 0));
  c.set("link_weighted_eq_constraint", S(link2 ? 1 : 0));
  c.set("link_constraint_le_theta", S(link3 ? 1 : 0));
  c.set("link_theta_lt_one", S(link4 ? 1 : 0));
  if (!consts) c.notes.push_back("schedule constants a, b, kappa do not dominate those of the sequence");
  if (!steps_bounded) c.notes.push_back("some ||x_n - x_{n+1}|| exceeds 2b");
  c.heuristic = !s.kappa().certified;
  c.evaluated = alpha.size();
  c.holds = link1 && link2 && link3 && link4 && consts && steps_bounded;
  return c;
}

}  // namespace fpcert
