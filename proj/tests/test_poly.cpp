#include <gtest/gtest.h>

#include <boost/math/special_functions/binomial.hpp>

#include "shadowlab/catalog.hpp"
#include "shadowlab/serialize.hpp"
#include "shadowlab/subspace.hpp"
#include "test_util.hpp"

using namespace shadowlab;
using namespace shadowlab::testing;

namespace {

RationalPolynomial P(const std::string& s, std::vector<std::string> vars = {}) { return parse_polynomial(s, std::move(vars)); }

long long binom(int n, int k) { return std::llround(boost::math::binomial_coefficient<double>(n, k)); }

}  // namespace

TEST(Rational, ParsesFractionsAndDecimalsExactly) {
  EXPECT_EQ(parse_rational("3/2"), Rational(3, 2));
  EXPECT_EQ(parse_rational("-0.125"), Rational(-1, 8));
  EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(to_string(Rational(-6, 4)), "-3/2");
  EXPECT_THROW(parse_rational("abc"), std::invalid_argument);
}

TEST(Rational, ApproximationFindsSmallDenominators) {
  EXPECT_EQ(approximate_rational(0.333333333333, 1000), Rational(1, 3));
  EXPECT_EQ(approximate_rational(-2.5, 10), Rational(-5, 2));
  EXPECT_EQ(to_double(exact_rational(0.1)), 0.1);
}

TEST(Rational, LdlDetectsPsd) {
  RationalMatrix a(2, 2);
  a << 1, 1, 1, 1;
  EXPECT_TRUE(factor_psd(a).has_value());
  a(1, 1) = Rational(1, 2);
  EXPECT_FALSE(factor_psd(a).has_value());
}

TEST(Monomial, GradedLexOrder) {
  const auto ms = monomials_up_to(2, 0, 2);
  ASSERT_EQ(ms.size(), 6u);
  EXPECT_EQ(ms[0], (Monomial{0, 0}));
  EXPECT_EQ(ms[1], (Monomial{1, 0}));
  EXPECT_EQ(ms[2], (Monomial{0, 1}));
  EXPECT_EQ(ms[3], (Monomial{2, 0}));
  EXPECT_EQ(ms[4], (Monomial{1, 1}));
  EXPECT_EQ(ms[5], (Monomial{0, 2}));
}

TEST(Polynomial, ArithmeticExamples) {
  const std::vector<std::string> v{"x"};
  EXPECT_EQ(P("(x+1)*(x-1)", v), P("x^2-1", v));
  EXPECT_EQ(P("x", v) + RationalPolynomial(v), P("x", v));
  EXPECT_TRUE((P("x", v) - P("x", v)).is_zero());
  EXPECT_EQ(RationalPolynomial(v).degree(), kZeroPolynomialDegree);
}

TEST(Polynomial, MismatchedVariablesThrow) {
  EXPECT_THROW(P("x") + P("y"), std::invalid_argument);
}

TEST(Polynomial, RingAxiomsOnRandomInputs) {
  std::mt19937_64 rng(1);
  const std::vector<std::string> v{"x", "y", "z"};
  for (int t = 0; t < 50; ++t) {
    const auto f = random_polynomial(rng, v, 3), g = random_polynomial(rng, v, 3), h = random_polynomial(rng, v, 2);
    EXPECT_EQ((f * g) * h, f * (g * h));
    EXPECT_EQ(f * (g + h), f * g + f * h);
    EXPECT_EQ(f * g, g * f);
    EXPECT_EQ(f + g, g + f);
    if (!f.is_zero() && !g.is_zero()) {
      EXPECT_EQ((f * g).degree(), f.degree() + g.degree());
    }
  }
}

TEST(Polynomial, SubstituteExamples) {
  const std::vector<std::string> v{"x", "y"};
  std::map<std::string, RationalPolynomial> a{{"x", P("x+1", v)}, {"y", P("y-1", v)}};
  EXPECT_EQ(substitute(P("x+y", v), a), P("x+y", v));
  std::map<std::string, RationalPolynomial> partial{{"x", P("y", v)}};
  EXPECT_THROW(substitute(P("x+y", v), partial), std::invalid_argument);
}

TEST(Polynomial, SubstituteIsRingHomomorphism) {
  std::mt19937_64 rng(2);
  const std::vector<std::string> v{"x", "y"};
  for (int t = 0; t < 30; ++t) {
    const auto f = random_polynomial(rng, v, 3), g = random_polynomial(rng, v, 3);
    std::map<std::string, RationalPolynomial> a{{"x", random_polynomial(rng, v, 2, 2)}, {"y", random_polynomial(rng, v, 2, 2)}};
    EXPECT_EQ(substitute(f * g, a), substitute(f, a) * substitute(g, a));
    EXPECT_EQ(substitute(f + g, a), substitute(f, a) + substitute(g, a));
  }
}

TEST(Polynomial, ShiftExamplesAndRoundTrip) {
  EXPECT_EQ(shift(P("x^2"), std::vector<Rational>{1}), P("x^2+2*x+1"));
  std::mt19937_64 rng(3);
  const std::vector<std::string> v{"x", "y", "z"};
  for (int t = 0; t < 30; ++t) {
    const auto f = random_polynomial(rng, v, 4);
    std::vector<Rational> xi{random_rational(rng), random_rational(rng), random_rational(rng)}, neg;
    for (const auto& q : xi) neg.push_back(-q);
    EXPECT_EQ(shift(f, std::vector<Rational>(3, Rational(0))), f);
    EXPECT_EQ(shift(shift(f, xi), neg), f);
  }
  EXPECT_THROW(shift(P("x"), std::vector<Rational>{1, 2}), std::invalid_argument);
}

TEST(Polynomial, HomogenizeAndDehomogenize) {
  EXPECT_EQ(homogenize(P("1+x^2"), "x0"), P("x0^2+x^2", {"x0", "x"}));
  const NamedForm m = catalog("motzkin");
  EXPECT_EQ(dehomogenize(m.polynomial, "x0"), P("x1^6 + x2^2 + x2^4 - 3*x1^2*x2^2", {"x1", "x2"}));
  EXPECT_THROW(dehomogenize(P("x+1"), "x"), std::invalid_argument);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 30; ++t) {
    const auto f = random_polynomial(rng, {"x", "y"}, 4);
    if (f.is_zero()) continue;
    const auto F = homogenize(f, "w");
    EXPECT_TRUE(F.is_homogeneous());
    EXPECT_EQ(dehomogenize(F, "w"), f);
  }
}

TEST(Polynomial, LowestForm) {
  EXPECT_EQ(lowest_form(P("1+x^2")), P("1", {"x"}));
  EXPECT_EQ(lowest_form(P("x^2+x^3")), P("x^2"));
  EXPECT_THROW(lowest_form(RationalPolynomial({"x"})), std::invalid_argument);
  // Lowest form of p(x - xi) expanded about xi is p itself.
  const NamedForm m = catalog("motzkin");
  std::vector<Rational> xi{Rational(1, 2), Rational(-1, 3), Rational(2)}, neg;
  for (const auto& q : xi) neg.push_back(-q);
  const auto g = shift(m.polynomial, neg);
  EXPECT_EQ(lowest_form(shift(g, xi)), m.polynomial);
}

TEST(Polynomial, MotzkinDehomogenizationMatchesTermByTerm) {
  const NamedForm m = catalog("motzkin");
  std::map<std::string, RationalPolynomial> a{{"x0", P("1", {"x1", "x2"})}, {"x1", P("x1", {"x1", "x2"})}, {"x2", P("x2", {"x1", "x2"})}};
  EXPECT_EQ(substitute(m.polynomial, a, {"x1", "x2"}), P("1*x1^6 + x2^4*1 + x2^2 - 3*x1^2*x2^2", {"x1", "x2"}));
}

TEST(Subspace, MembershipAndIndependence) {
  const std::vector<std::string> v{"x", "y"};
  Subspace U(v, {P("x+y", v), P("x-y", v)});
  EXPECT_EQ(U.dim(), 2);
  EXPECT_TRUE(U.contains(P("x", v)));
  EXPECT_FALSE(U.contains(P("x^2", v)));
  EXPECT_FALSE(U.contains_one());
  EXPECT_TRUE(U.with_one().contains_one());
  EXPECT_THROW(Subspace(v, {P("x", v), P("2*x", v)}), std::invalid_argument);
}

TEST(Subspace, MonomialSubspaceDimensions) {
  EXPECT_EQ(monomial_subspace(3, 6, false).dim(), 83);
  EXPECT_EQ(monomial_subspace(4, 4, false).dim(), 69);
  EXPECT_EQ(monomial_subspace(2, 6, false).dim(), 27);
  for (int n = 1; n <= 6; ++n)
    for (int d = 1; d <= 6; ++d) EXPECT_EQ(monomial_subspace(n, d, false).dim(), binom(n + d, n) - 1) << n << "," << d;
  EXPECT_TRUE(monomial_subspace(2, 2, true).contains_one());
}

TEST(Subspace, ShiftSupportExamples) {
  const auto S = shift_support(P("t^2 + x^2", {"t", "x"}), std::string("t"));
  EXPECT_EQ(S.dim(), 2);
  EXPECT_TRUE(S.contains(P("x", {"x"})));
  EXPECT_TRUE(S.contains(P("x^2", {"x"})));
  EXPECT_EQ(shift_support(catalog("motzkin").polynomial).dim(), 27);
  EXPECT_EQ(shift_support(catalog("choi-lam").polynomial).dim(), 19);
  EXPECT_THROW(shift_support(P("x + x^2")), std::invalid_argument);
}

TEST(Subspace, ShiftSupportSoundness) {
  std::mt19937_64 rng(5);
  for (const char* name : {"motzkin", "choi-lam"}) {
    const NamedForm f = catalog(name);
    const Subspace L = shift_support(f.polynomial);
    for (int t = 0; t < 100; ++t) {
      std::vector<Rational> a;
      for (std::size_t i = 0; i < f.vars.size(); ++i) a.push_back(random_rational(rng));
      const auto g = shift(f.polynomial, a).without_constant();
      RationalPolynomial h(L.vars());
      for (const auto& [m, c] : g.terms()) h += RationalPolynomial::monomial(L.vars(), m, c);
      EXPECT_TRUE(L.contains(h)) << name;
    }
  }
}

TEST(Serialize, PolynomialJsonRoundTrip) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_polynomial(rng, {"x1", "x2"}, 4);
    EXPECT_EQ(polynomial_from_json(json::parse(to_json(f).dump())), f);
    EXPECT_EQ(parse_polynomial(to_string(f), {"x1", "x2"}), f);
  }
  const json j = json::parse(R"({"vars": ["x1","x2"], "terms": [{"exp": [2,0], "coeff": "3/2"}]})");
  EXPECT_EQ(polynomial_from_json(j), P("3/2*x1^2", {"x1", "x2"}));
}

TEST(Serialize, ParserOrdersVariablesNaturally) {
  const auto f = P("x10 + x2 + x1");
  EXPECT_EQ(f.vars(), (std::vector<std::string>{"x1", "x2", "x10"}));
  EXPECT_THROW(P("x +"), std::invalid_argument);
  EXPECT_THROW(P("x / y"), std::invalid_argument);
  EXPECT_EQ(P("x^2/2 - 0.5*x^2"), RationalPolynomial({"x"}));
}

TEST(Serialize, SubspaceAndPuiseuxRoundTrip) {
  const Subspace U = L14();
  const Subspace V = subspace_from_json(json::parse(to_json(U).dump()));
  EXPECT_EQ(V.dim(), 14);
  for (const auto& b : U.basis()) EXPECT_TRUE(V.contains(b));
  const PuiseuxScalar a = PuiseuxScalar::from_terms({{Rational(1, 2), Rational(-3)}}, Rational(7));
  const json pj = to_json(a);
  EXPECT_EQ(pj.dump(), R"({"series":[{"ord":"1/2","coeff":"-3"}],"trunc":"7"})");
  EXPECT_EQ(puiseux_from_json(pj), a);
}
