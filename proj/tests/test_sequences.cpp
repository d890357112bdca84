#include <gtest/gtest.h>

#include "fpcert/sequences.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace fpcert;
using V = CoordinateVector<double>;
using Q = CoordinateVector<Rational>;

namespace {

SamplingBudget exhaustive(std::size_t samples = 0) {
  SamplingBudget b;
  b.samples = samples;
  b.seed = 3;
  return b;
}

// ratio of the stored witness: ||sum a y|| / ||sum a x||
template <Scalar S>
S witness_ratio(const BasicSequence<S>& xs, const BasicSequence<S>& ys, const CoordinateVector<S>& a) {
  return span_norm(ys, a) / span_norm(xs, a);
}

}  // namespace

TEST(BasicSequence, ValidatesInput) {
  EXPECT_THROW(BasicSequence<double>({}, NormTag::sup(), {}), LengthError);
  EXPECT_THROW(BasicSequence<double>({V{1.0, 0.0}, V{1.0}}, NormTag::sup(), {}), LengthError);
  EXPECT_THROW(BasicSequence<double>({V{1.0, 0.0}, V{0.0, 0.0}}, NormTag::sup(), {}), DependenceError);
  EXPECT_THROW(BasicSequence<double>({V{1.0, 2.0}, V{2.0, 4.0}}, NormTag::sup(), {}), DependenceError);
  EXPECT_THROW(BasicSequence<double>({V{1.0}, V{2.0}}, NormTag::sup(), {}), DependenceError);
  EXPECT_THROW(BasicSequence<double>({V{1.0}}, NormTag::sup(), KappaInterval<double>{0.5, 1.0}), ParameterError);
  const auto s = summing_c0<double>(3);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.a(), 1.0);
  EXPECT_EQ(s.b(), 1.0);
  EXPECT_EQ(s[3], (V{1.0, 1.0, 1.0}));
}

TEST(HeadProjection, Examples) {
  const auto s = ell1_canonical<Rational>(3);
  const SpanElement<Rational> e{Q{1, 2, 3}};
  EXPECT_EQ(head_projection(s, e, 2).coeffs, (Q{1, 2, 0}));
  EXPECT_EQ(head_projection(s, e, 0).coeffs, (Q{0, 0, 0}));
  EXPECT_EQ(head_projection(s, e, 3).coeffs, (Q{1, 2, 3}));
  EXPECT_THROW(head_projection(s, e, 4), IndexError);
}

TEST(HeadProjection, CompositionAndRemainder) {
  const auto s = ell1_canonical<Rational>(12);
  gen::for_all(300, 21, [&](gen::Gen& g, std::size_t) {
    const std::size_t m = g.size(1, 12);
    const SpanElement<Rational> e{g.vector<Rational>(m)};
    const std::size_t n = g.size(0, m);
    const std::size_t k = g.size(0, m);
    EXPECT_EQ(head_projection(s, head_projection(s, e, k), n).coeffs, head_projection(s, e, std::min(n, k)).coeffs);
    EXPECT_EQ(head_projection(s, e, n).coeffs + tail_remainder(s, e, n).coeffs, e.coeffs);
  });
}

TEST(BasisConstant, CanonicalBasesAreMonotone) {
  for (std::size_t m = 1; m <= 6; ++m) {
    const auto l1 = basis_constant(ell1_canonical<double>(m), exhaustive());
    EXPECT_DOUBLE_EQ(l1.kappa.lower, 1.0);
    EXPECT_DOUBLE_EQ(l1.kappa.upper, 1.0);
    const auto c0 = basis_constant(c0_canonical<double>(m), exhaustive());
    EXPECT_DOUBLE_EQ(c0.kappa.lower, 1.0);
    EXPECT_DOUBLE_EQ(c0.kappa.upper, 1.0);
    EXPECT_TRUE(c0.mode.exhaustive);
    EXPECT_FALSE(c0.kappa.certified);
  }
}

TEST(BasisConstant, SummingBasisMatchesOracle) {
  for (std::size_t m = 2; m <= 6; ++m) {
    const auto est = basis_constant(summing_c0<Rational>(m), exhaustive());
    EXPECT_EQ(est.kappa.lower, oracle::summing_basis_constant(m)) << "m=" << m;
    std::size_t n = 0;
    EXPECT_EQ(detail::projection_ratio(summing_c0<Rational>(m), est.witness, &n), est.kappa.lower);
    EXPECT_EQ(n, est.witness_n);
  }
  EXPECT_EQ(oracle::summing_basis_constant(4), Rational(2));
}

TEST(BasisConstant, DependentCoefficientsRaise) {
  // Not reachable through BasicSequence, so exercise the guard directly.
  const auto s = ell1_canonical<double>(2);
  EXPECT_THROW(detail::projection_ratio(s, V{1e-14, 0.0}), DependenceError);
}

TEST(Domination, Examples) {
  const auto b = exhaustive();
  const auto xs = ell1_canonical<Rational>(6);
  const auto ys = summing_c0<Rational>(6);
  const auto c = domination_constant(xs, ys, b, Rational(1));
  EXPECT_EQ(c.constant("L_hat"), Rational(1));
  EXPECT_EQ(c.violations, 0u);
  EXPECT_TRUE(c.holds);
  EXPECT_EQ(c.evaluated, 728u);
  EXPECT_EQ(witness_ratio(xs, ys, c.witness("argmax").vectors[0]), c.constant("L_hat"));

  EXPECT_EQ(domination_constant(xs, xs, b).constant("L_hat"), Rational(1));
  EXPECT_EQ(domination_constant(xs, xs.scaled(Rational(2)), b).constant("L_hat"), Rational(2));
  const auto strict = domination_constant(xs, xs.scaled(Rational(2)), b, Rational(3, 2));
  EXPECT_FALSE(strict.holds);
  EXPECT_EQ(strict.violations, 728u);
}

TEST(Equivalence, Examples) {
  const auto b = exhaustive();
  const auto xs = ell1_canonical<Rational>(6);
  const auto self = equivalence_constants(xs, xs, b);
  EXPECT_EQ(self.constant("r_min"), Rational(1));
  EXPECT_EQ(self.constant("r_max"), Rational(1));

  const auto shifted = BasicSequence<Rational>(unit_vectors<Rational>(6, 7, 1), NormTag::ell_p(1.0),
                                               exact_kappa<Rational>(Rational(1), "monotone basis"));
  const auto xs7 = ell1_canonical<Rational>(6, 7);
  const auto sh = equivalence_constants(xs7, shifted, b);
  EXPECT_EQ(sh.constant("r_min"), Rational(1));
  EXPECT_EQ(sh.constant("r_max"), Rational(1));

  const auto s = summing_c0<Rational>(6, 12);
  const auto sub = summing_c0<Rational>(12).subsequence({2, 4, 6, 8, 10, 12}, exact_kappa<Rational>(Rational(2), "subsequence"));
  const auto sp = equivalence_constants(s, sub, b);
  EXPECT_EQ(sp.constant("r_min"), Rational(1));
  EXPECT_EQ(sp.constant("r_max"), Rational(1));
  EXPECT_EQ(sp.constant("L"), Rational(1));
}

TEST(Equivalence, DominationBoundsEquivalence) {
  gen::for_all(20, 22, [](gen::Gen& g, std::size_t) {
    const std::size_t m = g.size(2, 5);
    std::vector<V> rows;
    for (std::size_t i = 0; i < m; ++i) rows.push_back(V::delta(i + 1, m) + g.vector<double>(m).scaled(0.1));
    const BasicSequence<double> xs = ell1_canonical<double>(m);
    const BasicSequence<double> ys(rows, NormTag::sup(), {});
    SamplingBudget b;
    b.samples = 200;
    b.seed = 5;
    const auto xy = domination_constant(xs, ys, b);
    const auto yx = domination_constant(ys, xs, b);
    const auto eq = equivalence_constants(xs, ys, b);
    EXPECT_LE(std::max(xy.constant("L_hat"), yx.constant("L_hat")), eq.constant("L") * (1 + 1e-12));
    // witnesses re-evaluate
    EXPECT_NEAR(witness_ratio(xs, ys, eq.witness("argmin").vectors[0]), eq.constant("r_min"), 1e-9);
    EXPECT_NEAR(witness_ratio(xs, ys, eq.witness("argmax").vectors[0]), eq.constant("r_max"), 1e-9);
  });
}

TEST(WideS, Examples) {
  for (std::size_t m = 1; m <= 10; ++m) {
    const auto c = wide_s_certificate(ell1_canonical<Rational>(m), exhaustive());
    EXPECT_EQ(c.constant("d_hat"), Rational(1)) << "m=" << m;
    EXPECT_TRUE(c.mode.exhaustive);
  }
  const auto s = wide_s_certificate(summing_c0<Rational>(6), exhaustive());
  EXPECT_EQ(s.constant("d_hat"), Rational(1));
  for (std::size_t m : {4u, 8u}) {
    const auto c = wide_s_certificate(c0_canonical<Rational>(m), exhaustive());
    EXPECT_LE(c.constant("d_hat"), Rational(1, static_cast<long>(m)));
    const auto& w = c.witness("argmin").vectors[0];
    EXPECT_EQ(span_norm(c0_canonical<Rational>(m), w) / summing_basis_norm(w), c.constant("d_hat"));
  }
}

TEST(GapBound, Examples) {
  SamplingBudget b;
  b.samples = 10000;
  b.seed = 9;
  const auto l1 = gap_bound_check(ell1_canonical<double>(8), b);
  EXPECT_TRUE(l1.holds);
  EXPECT_GE(l1.constant("min_gap"), 1.0 - 1e-12);
  EXPECT_FALSE(l1.heuristic);

  const auto single = gap_bound_check(ell1_canonical<double>(1), b);
  EXPECT_TRUE(single.holds);

  const auto kappa = oracle::summing_basis_constant(6);
  const auto s = summing_c0<double>(6).with_kappa(exact_kappa(to_double(kappa), "oracle"));
  const auto sc = gap_bound_check(s, b);
  EXPECT_TRUE(sc.holds);
  EXPECT_EQ(sc.evaluated, 10000u);
  EXPECT_EQ(sc.violations, 0u);
  EXPECT_NEAR(span_norm(s, sc.witness("x_minus_y").vectors[0]), sc.constant("min_gap"), 1e-12);
}

TEST(Sampling, DeterministicAcrossThreadCounts) {
  const auto s = summing_c0<double>(14);
  SamplingBudget one;
  one.samples = 3000;
  one.seed = 42;
  SamplingBudget four = one;
  four.threads = 4;
  const auto a = domination_constant(ell1_canonical<double>(14), s, one);
  const auto b = domination_constant(ell1_canonical<double>(14), s, four);
  EXPECT_EQ(a.constant("L_hat"), b.constant("L_hat"));
  EXPECT_EQ(a.witness("argmax").vectors[0], b.witness("argmax").vectors[0]);
  EXPECT_EQ(a.evaluated, b.evaluated);
}

TEST(Sampling, ModeLabels) {
  SamplingBudget b;
  b.samples = 0;
  CoefficientSource<double> small(3, b);
  EXPECT_EQ(small.size(), 26u);
  EXPECT_STREQ(small.mode().label(), "EXHAUSTIVE");
  b.samples = 5;
  CoefficientSource<double> big(11, b);
  EXPECT_EQ(big.size(), 5u);
  EXPECT_STREQ(big.mode().label(), "SAMPLED");
  EXPECT_FALSE(big.mode().exhaustive);
}
