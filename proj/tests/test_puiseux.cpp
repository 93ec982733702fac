#include <gtest/gtest.h>

#include "shadowlab/obstruction.hpp"
#include "shadowlab/puiseux.hpp"
#include "shadowlab/serialize.hpp"
#include "test_util.hpp"

using namespace shadowlab;
using namespace shadowlab::testing;

namespace {
PuiseuxScalar t(const Rational& k = Rational(1)) { return PuiseuxScalar::monomial(Rational(1), k); }
}  // namespace

TEST(Puiseux, ArithmeticExamples) {
  EXPECT_EQ(t() * t(), t(Rational(2)));
  EXPECT_EQ((PuiseuxScalar(1) + t()) * (PuiseuxScalar(1) - t()), PuiseuxScalar(1) - t(Rational(2)));
  const PuiseuxScalar g = divide(PuiseuxScalar(1), PuiseuxScalar(1) - t(), Rational(3));
  EXPECT_EQ(g.terms().size(), 3u);
  EXPECT_EQ(g.coeff_at(Rational(0)), 1);
  EXPECT_EQ(g.coeff_at(Rational(1)), 1);
  EXPECT_EQ(g.coeff_at(Rational(2)), 1);
  ASSERT_TRUE(g.trunc().has_value());
  EXPECT_EQ(*g.trunc(), 3);
}

TEST(Puiseux, TruncationRules) {
  const PuiseuxScalar a = PuiseuxScalar::from_terms({{Rational(1), Rational(1)}}, Rational(4));
  const PuiseuxScalar b = PuiseuxScalar::from_terms({{Rational(2), Rational(1)}}, Rational(3));
  EXPECT_EQ(*(a + b).trunc(), 3);
  // min(o(a) + trunc_b, o(b) + trunc_a) = min(4, 6)
  EXPECT_EQ(*(a * b).trunc(), 4);
  const PuiseuxScalar z = a - a;
  EXPECT_TRUE(z.is_indeterminate());
  EXPECT_THROW(z.valuation(), IndeterminateError);
  EXPECT_THROW(divide(PuiseuxScalar(1), PuiseuxScalar(), Rational(3)), std::domain_error);
}

TEST(Puiseux, ValuationSignResidueExamples) {
  EXPECT_EQ((t(Rational(1, 2)) + t()).valuation(), Rational(1, 2));
  EXPECT_EQ(PuiseuxScalar(5).valuation(), 0);
  EXPECT_EQ((-t() + t(Rational(2))).sign(), -1);
  EXPECT_EQ((PuiseuxScalar(2) + t()).residue(), 2);
  const PuiseuxScalar inv = divide(PuiseuxScalar(1), t(), Rational(5));
  EXPECT_FALSE(inv.in_valuation_ring());
  EXPECT_THROW(inv.residue(), std::domain_error);
  EXPECT_EQ(t().residue(), 0);
  EXPECT_TRUE(t().in_maximal_ideal());
}

TEST(Puiseux, ValuationAxioms) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_puiseux(rng), b = random_puiseux(rng);
    EXPECT_EQ((a * b).valuation(), a.valuation() + b.valuation());
    const auto s = a + b;
    if (s.is_zero()) continue;
    EXPECT_GE(s.valuation(), std::min(a.valuation(), b.valuation()));
    if (a.valuation() != b.valuation()) {
      EXPECT_EQ(s.valuation(), std::min(a.valuation(), b.valuation()));
    }
    EXPECT_EQ((a * b).sign(), a.sign() * b.sign());
  }
}

TEST(Puiseux, ValuationRingAndResidueHomomorphism) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 1000; ++k) {
    const auto a = random_puiseux(rng, 0), b = random_puiseux(rng, 0);
    ASSERT_TRUE(a.in_valuation_ring());
    EXPECT_TRUE((a * b).in_valuation_ring());
    const auto s = a + b;
    EXPECT_TRUE(s.in_valuation_ring());
    EXPECT_EQ((a * b).residue(), a.residue() * b.residue());
    EXPECT_EQ(s.residue(), a.residue() + b.residue());
    if (a.in_maximal_ideal()) {
      EXPECT_TRUE((a * b).in_maximal_ideal());
    }
    if (a.in_maximal_ideal() && b.in_maximal_ideal() && !s.is_zero()) {
      EXPECT_TRUE(s.in_maximal_ideal());
    }
  }
}

TEST(Puiseux, DivideEpsPower) {
  const std::vector<std::string> v{"x"};
  const auto x = PuiseuxPolynomial::variable(v, "x");
  const auto f = x * x * t(Rational(2));
  EXPECT_EQ(divide_eps_power(f, Rational(2)), x * x);
  const auto g = x * (t(Rational(3)) + t(Rational(4)));
  EXPECT_EQ(divide_eps_power(g, Rational(3)), x * (PuiseuxScalar(1) + t()));
  EXPECT_THROW(divide_eps_power(x * t(), Rational(2)), std::domain_error);
}

TEST(Puiseux, EpsScaledFormsAreDivisible) {
  std::mt19937_64 rng(13);
  const std::vector<std::string> v{"x0", "x1", "x2"};
  for (int k = 0; k < 100; ++k) {
    const int d = 2 * std::uniform_int_distribution<int>(1, 3)(rng);
    const auto F = random_form(rng, v, d);
    if (F.is_zero()) continue;
    // Identity F(eps, eps x) / eps^d -> F(1, x).
    EXPECT_EQ(infinitesimal_reduction(F), dehomogenize(F, "x0"));
  }
}

TEST(Puiseux, SubstituteEpsIntoMotzkin) {
  const std::vector<std::string> v{"x1", "x2"};
  const RationalPolynomial p = parse_polynomial("x1^6 + x0^4*x2^2 + x0^2*x2^4 - 3*x0^2*x1^2*x2^2", {"x0", "x1", "x2"});
  std::map<std::string, PuiseuxPolynomial> a{{"x0", PuiseuxPolynomial::constant(v, t())},
                                             {"x1", PuiseuxPolynomial::variable(v, "x1")},
                                             {"x2", PuiseuxPolynomial::variable(v, "x2")}};
  const auto f = substitute(promote(p), a, v);
  EXPECT_EQ(f.coeff(Monomial{0, 2}), t(Rational(4)));
  EXPECT_EQ(f.coeff(Monomial{2, 2}), PuiseuxScalar(-3) * t(Rational(2)));
  EXPECT_EQ(f.coeff(Monomial{6, 0}), PuiseuxScalar(1));
}
