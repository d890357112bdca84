#include <gtest/gtest.h>

#include "fpcert/blocks.hpp"
#include "generators.hpp"

using namespace fpcert;
using Q = CoordinateVector<Rational>;

namespace {

SamplingBudget exhaustive() {
  SamplingBudget b;
  b.samples = 0;
  b.seed = 17;
  return b;
}

// y_n = 2^n e_n in l1.
BasicSequence<Rational> weighted(std::size_t m) {
  std::vector<Q> rows;
  for (std::size_t n = 1; n <= m; ++n) rows.push_back(Q::delta(n, m).scaled(Rational(pow_int(Rational(2), static_cast<unsigned>(n)))));
  return BasicSequence<Rational>(rows, NormTag::ell_p(1.0), exact_kappa<Rational>(1, "unconditional"));
}

}  // namespace

TEST(ConvexBlocks, Examples) {
  const auto s = ell1_canonical<Rational>(4);
  EXPECT_EQ(convex_block_vectors(s, ConvexBlockSpec<Rational>::singletons(4)), s.vectors());

  const ConvexBlockSpec<Rational> pair({{{1, 2}, {Rational(1, 2), Rational(1, 2)}}});
  const auto x = convex_block_vectors(s, pair);
  EXPECT_EQ(x[0], (Q{Rational(1, 2), Rational(1, 2), 0, 0}));
  EXPECT_EQ(norm(x[0], s.ambient()), Rational(1));

  const auto sum = summing_c0<Rational>(4);
  const auto y = convex_block_vectors(sum, pair);
  EXPECT_EQ(y[0], sum[1].scaled(Rational(1, 2)) + sum[2].scaled(Rational(1, 2)));
  EXPECT_EQ(summing_basis_norm(Q{Rational(1, 2), Rational(1, 2)}), Rational(1));
}

TEST(ConvexBlocks, Validation) {
  using B = ConvexBlockSpec<Rational>;
  EXPECT_THROW(B({{{1, 2}, {Rational(1, 2), Rational(1, 2)}}, {{2, 3}, {Rational(1, 2), Rational(1, 2)}}}), ParameterError);
  EXPECT_THROW(B({{{2, 1}, {Rational(1, 2), Rational(1, 2)}}}), ParameterError);
  EXPECT_THROW(B({{{1}, {Rational(1, 2)}}}), ParameterError);
  EXPECT_THROW(B({{{1, 2}, {Rational(3, 2), Rational(-1, 2)}}}), ParameterError);
  EXPECT_THROW(convex_block_vectors(ell1_canonical<Rational>(2), B::uniform(2, 2)), IndexError);
}

TEST(ConvexBlocks, PullBackKeepsConvexity) {
  gen::for_all(200, 51, [](gen::Gen& g, std::size_t) {
    const std::size_t count = g.size(1, 5);
    const std::size_t width = g.size(1, 4);
    const auto spec = ConvexBlockSpec<Rational>::uniform(count, width);
    const ConvexCoefficients<Rational> t(g.simplex<Rational>(count));
    const auto c = pull_back_coefficients(spec, t, count * width + 2);  // constructor validates mass 1
    Rational mass = 0;
    for (const auto& x : c.coords().entries()) {
      EXPECT_GE(x, 0);
      mass += x;
    }
    EXPECT_EQ(mass, 1);
    // The pulled-back point is the same vector of the ambient space.
    const auto s = ell1_canonical<Rational>(count * width + 2);
    const auto blocks = BasicSequence<Rational>(convex_block_vectors(s, spec), s.ambient(), {});
    EXPECT_EQ(synthesize(blocks, t.coords()), synthesize(s, c.coords()));
  });
}

TEST(Wuc, Examples) {
  EXPECT_EQ(wuc_constant(c0_canonical<Rational>(6), exhaustive()).constant("c2_hat"), Rational(1));
  EXPECT_EQ(wuc_constant(ell1_canonical<Rational>(6), exhaustive()).constant("c2_hat"), Rational(6));
  const auto w = wuc_constant(ell1_canonical<Rational>(6), exhaustive()).witness("argmax").vectors[0];
  for (const auto& x : w.entries()) EXPECT_EQ(abs(x), Rational(1));

  // y_n = s_{n+1} - s_n = e_{n+1}
  const auto s = summing_c0<Rational>(7);
  std::vector<Q> diffs;
  for (std::size_t n = 1; n <= 6; ++n) diffs.push_back(s[n + 1] - s[n]);
  const BasicSequence<Rational> ys(diffs, NormTag::sup(), {});
  EXPECT_EQ(wuc_constant(ys, exhaustive()).constant("c2_hat"), Rational(1));
}

TEST(SummingEquivalence, SummingBasisAgainstItself) {
  for (std::size_t m = 1; m <= 6; ++m) {
    const auto c = summing_equivalence_check(summing_c0<Rational>(m), Rational(1), Rational(1), exhaustive());
    EXPECT_TRUE(c.holds) << "m=" << m;
    EXPECT_EQ(c.violations, 0u);
  }
}

TEST(ShiftEquivalence, Examples) {
  const auto s = shift_equivalence_constants(summing_c0<Rational>(8), 3, exhaustive());
  EXPECT_EQ(s.constant("L_hat"), Rational(1));
  const auto l1 = shift_equivalence_constants(ell1_canonical<Rational>(8), 3, exhaustive());
  EXPECT_EQ(l1.constant("L_hat"), Rational(1));
  const auto w = shift_equivalence_constants(weighted(8), 3, exhaustive());
  for (std::size_t p = 1; p <= 3; ++p) {
    EXPECT_EQ(w.constant("r_min_p" + std::to_string(p)), Rational(1 << p));
    EXPECT_EQ(w.constant("r_max_p" + std::to_string(p)), Rational(1 << p));
  }
  EXPECT_EQ(w.constant("L_hat"), Rational(8));
  EXPECT_THROW(shift_equivalence_constants(summing_c0<Rational>(3), 3, exhaustive()), IndexError);
}

TEST(PerturbationBudget, Examples) {
  EXPECT_EQ(shift_perturbation_budget(Rational(1), Rational(1), Rational(1)), Rational(1, 12));
  EXPECT_LT(shift_perturbation_budget(1.0, 1.0, 1e6), 1e-6);
  EXPECT_THROW(shift_perturbation_budget(0.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(shift_perturbation_budget(1.0, 0.5, 1.0), ParameterError);
  EXPECT_THROW(shift_perturbation_budget(1.0, 1.0, -1.0), ParameterError);
}

TEST(ShiftConclusion, Examples) {
  const auto s = shift_conclusion_check(summing_c0<Rational>(8), Rational(1), 3, exhaustive(), LowerConvention::Custom,
                                          Rational(1, 2));
  EXPECT_TRUE(s.holds);
  EXPECT_EQ(s.constant("ratio_min"), Rational(1));
  EXPECT_EQ(s.constant("ratio_max"), Rational(1));
  const auto l1 = shift_conclusion_check(ell1_canonical<Rational>(8), Rational(1), 3, exhaustive());
  EXPECT_TRUE(l1.holds);

  // Ratio is exactly 2: the upper side holds with equality under both
  // conventions, L/2 = 1 and 1/(2L) = 1/4 both hold on the lower side.
  const auto w = shift_conclusion_check(weighted(6), Rational(2), 1, exhaustive());
  EXPECT_EQ(w.constant("ratio_max"), Rational(2));
  EXPECT_EQ(w.constant("margin_upper"), Rational(0));
  EXPECT_EQ(w.constant("lower_half"), Rational(1));
  EXPECT_EQ(w.constant("lower_symmetric"), Rational(1, 4));
  EXPECT_TRUE(w.holds);

  // L = 1/2 separates the conventions: L/2 = 1/4 holds, 1/(2L) = 1 fails on
  // ratios of 1/2 for the reversed weights.
  std::vector<Q> rows;
  for (std::size_t n = 1; n <= 6; ++n) rows.push_back(Q::delta(n, 6).scaled(Rational(1, 1 << n)));
  const BasicSequence<Rational> down(rows, NormTag::ell_p(1.0), exact_kappa<Rational>(1, "unconditional"));
  const auto half = shift_conclusion_check(down, Rational(1, 2), 1, exhaustive(), LowerConvention::Half);
  const auto symmetric = shift_conclusion_check(down, Rational(1, 2), 1, exhaustive(), LowerConvention::Symmetric);
  EXPECT_TRUE(half.holds);
  EXPECT_FALSE(symmetric.holds);
  EXPECT_EQ(half.constant("violations_lower_symmetric"), Rational(static_cast<long>(symmetric.violations)));
}
