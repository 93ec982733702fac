#include <gtest/gtest.h>

#include "shadowlab/catalog.hpp"
#include "shadowlab/serialize.hpp"
#include "shadowlab/sos.hpp"
#include "test_util.hpp"

using namespace shadowlab;
using namespace shadowlab::testing;

namespace {

RationalPolynomial P(const std::string& s, std::vector<std::string> vars = {}) { return parse_polynomial(s, std::move(vars)); }

std::vector<WeightedBlock> plain(const Subspace& U) {
  return {{RationalPolynomial::constant(U.vars(), Rational(1)), U.basis()}};
}

RationalMatrix rmat(std::initializer_list<std::initializer_list<int>> rows) {
  RationalMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (int v : r) m(i, j++) = Rational(v);
    ++i;
  }
  return m;
}

}  // namespace

TEST(Sos, SquareOfLinear) {
  const std::vector<std::string> v{"x"};
  const Subspace U(v, {P("1", v), P("x", v)});
  const SosResult r = sos_decide(P("x^2+2*x+1", v), U);
  ASSERT_EQ(r.verdict, SosVerdict::Sos);
  ASSERT_TRUE(r.certificate.has_value());
  ASSERT_TRUE(r.certificate->exact.has_value());
  EXPECT_TRUE(r.certificate->exact_verified);
  EXPECT_EQ(r.certificate->exact->gram[0], rmat({{1, 1}, {1, 1}}));
  EXPECT_TRUE(verify_certificate(*r.certificate, P("x^2+2*x+1", v)));
}

TEST(Sos, DiagonalGram) {
  const std::vector<std::string> v{"x"};
  const Subspace U(v, {P("1", v), P("x", v)});
  const SosResult r = sos_decide(P("2*x^2+2", v), U);
  ASSERT_EQ(r.verdict, SosVerdict::Sos);
  ASSERT_TRUE(r.certificate->exact.has_value());
  EXPECT_EQ(r.certificate->exact->gram[0], rmat({{2, 0}, {0, 2}}));
}

TEST(Sos, NegativeConstantHasWitness) {
  const std::vector<std::string> v{"x"};
  const Subspace U(v, {P("1", v)});
  const SosResult r = sos_decide(P("-1", v), U);
  ASSERT_EQ(r.verdict, SosVerdict::NotSos);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_LE(r.witness->value, -1e-6);
  EXPECT_TRUE(check_witness(*r.witness, plain(U), P("-1", v)).ok);
}

TEST(Sos, DehomogenizedMotzkinIsNotSos) {
  const std::vector<std::string> v{"x1", "x2"};
  const auto f = P("1 + x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2", v);
  const Subspace U = monomial_subspace(2, 3, true, v);
  const SosResult r = sos_decide(f, U);
  ASSERT_EQ(r.verdict, SosVerdict::NotSos);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_LE(r.witness->value, -1e-6);
  EXPECT_GE(r.witness->min_eig, -1e-9);
  const WitnessCheck c = check_witness(*r.witness, plain(U), f);
  EXPECT_TRUE(c.ok);
  EXPECT_NEAR(c.value, r.witness->value, 1e-9);
}

TEST(Sos, MotzkinWithMultiplierIsExactlySos) {
  const NamedForm m = catalog("motzkin");
  EXPECT_NE(psd_via_multiplier(m.polynomial, 0).verdict, SosVerdict::Sos);
  const SosResult r = psd_via_multiplier(m.polynomial, 1);
  ASSERT_EQ(r.verdict, SosVerdict::Sos);
  ASSERT_TRUE(r.certificate.has_value());
  EXPECT_TRUE(r.certificate->exact_verified);
  const auto sigma = P("x0^2+x1^2+x2^2", m.vars);
  EXPECT_TRUE(verify_certificate(*r.certificate, sigma * m.polynomial));
  // Re-expand the squares by hand.
  RationalPolynomial sum(m.vars);
  for (const auto& s : r.certificate->squares) sum += RationalPolynomial::constant(m.vars, s.weight) * s.multiplier * s.q * s.q;
  EXPECT_EQ(sum, sigma * m.polynomial);
}

TEST(Sos, MultiplierExamples) {
  EXPECT_EQ(psd_via_multiplier(P("x^2+y^2"), 0).verdict, SosVerdict::Sos);
  for (int k = 0; k <= 3; ++k) EXPECT_NE(psd_via_multiplier(P("-x^2", {"x", "y"}), k).verdict, SosVerdict::Sos) << k;
  EXPECT_THROW(psd_via_multiplier(P("x^3+y^3"), 0), std::invalid_argument);
  EXPECT_THROW(psd_via_multiplier(P("x^2+1"), 0), std::invalid_argument);
}

TEST(Sos, PullbackExamples) {
  const std::vector<std::string> z{"z"};
  SosResult r = pullback_sos_check(P("x"), {P("z^2", z)}, Subspace(z, {P("z", z)}));
  ASSERT_EQ(r.verdict, SosVerdict::Sos);
  EXPECT_TRUE(verify_certificate(*r.certificate, P("z^2", z)));

  const std::vector<std::string> z2{"z1", "z2"};
  EXPECT_EQ(pullback(P("x1", {"x1", "x2"}), {P("z1^2", z2), P("z2", z2)}), P("z1^2", z2));
  r = pullback_sos_check(P("x1", {"x1", "x2"}), {P("z1^2", z2), P("z2", z2)}, Subspace(z2, {P("z1", z2)}));
  EXPECT_EQ(r.verdict, SosVerdict::Sos);

  EXPECT_EQ(pullback(P("x1*x2"), {P("z^2", z), P("z^2", z)}), P("z^4", z));
  r = pullback_sos_check(P("x1*x2"), {P("z^2", z), P("z^2", z)}, Subspace(z, {P("z^2", z)}));
  ASSERT_EQ(r.verdict, SosVerdict::Sos);
  EXPECT_TRUE(verify_certificate(*r.certificate, P("z^4", z)));

  EXPECT_THROW(pullback(P("x1*x2"), {P("z", z)}), std::invalid_argument);
}

TEST(Sos, NotInSpan) {
  const std::vector<std::string> v{"x"};
  EXPECT_THROW(sos_decide(P("x^3", v), Subspace(v, {P("1", v), P("x", v)})), NotInSpanError);
}

TEST(Sos, CompletenessOnRandomSumsOfSquares) {
  // dim U + 2 random squares: a generic Gram matrix of full rank.
  std::mt19937_64 rng(21);
  const std::vector<std::string> v{"x", "y"};
  const Subspace U = monomial_subspace(2, 2, true, v);
  int sos = 0;
  for (int t = 0; t < 100; ++t) {
    RationalPolynomial f(v);
    for (int i = 0; i < U.dim() + 2; ++i) {
      RationalPolynomial q(v);
      for (const auto& b : U.basis()) q += b * random_rational(rng);
      f += q * q;
    }
    const SosResult r = sos_decide(f, U);
    if (r.verdict == SosVerdict::Sos) {
      ++sos;
      EXPECT_TRUE(r.certificate->exact_verified);
      EXPECT_TRUE(verify_certificate(*r.certificate, f));
    }
  }
  EXPECT_EQ(sos, 100);
}

TEST(Sos, LowRankBoundaryCertificates) {
  const std::vector<std::string> v{"x", "y"};
  const Subspace U = monomial_subspace(2, 2, true, v);
  for (const char* s : {"289/9*x^4", "(x+y)^2", "(1 + x*y)^2", "(x^2 - 2*y^2)^2 + (x - y)^2", "(625/16)*x^4 + (25/2)*x^3*y + x^2*y^2"}) {
    const auto f = P(s, v);
    const SosResult r = sos_decide(f, U);
    ASSERT_EQ(r.verdict, SosVerdict::Sos) << s << ": " << r.note;
    EXPECT_TRUE(r.certificate->exact_verified) << s;
    EXPECT_TRUE(verify_certificate(*r.certificate, f));
  }
}

TEST(Sos, WitnessAndCertificateSoundness) {
  // Random forms in 3 variables of degree 4: whatever the verdict, the
  // accompanying object must re-check.
  std::mt19937_64 rng(22);
  const std::vector<std::string> v{"x", "y", "z"};
  const Subspace U = monomial_subspace(3, 2, true, v);
  for (int t = 0; t < 40; ++t) {
    auto f = random_polynomial(rng, v, 4, 6);
    if (t % 2 == 0) {
      const auto q = random_polynomial(rng, v, 2, 4);
      f = q * q + P("1", v);
    }
    SosResult r;
    try {
      r = sos_decide(f, U);
    } catch (const NotInSpanError&) {
      continue;
    }
    if (r.verdict == SosVerdict::Sos) {
      EXPECT_TRUE(verify_certificate(*r.certificate, f));
    } else if (r.verdict == SosVerdict::NotSos) {
      const WitnessCheck c = check_witness(*r.witness, plain(U), f);
      EXPECT_TRUE(c.ok) << to_string(f);
    }
  }
}

TEST(Sos, RationalizeReproducesExactIdentity) {
  const std::vector<std::string> v{"x", "y"};
  const auto f = P("x^4 + 2*x^2*y^2 + y^4 + x^2 + 1", v);
  SosOptions opt;
  opt.rationalize = false;
  const SosResult r = sos_decide(f, monomial_subspace(2, 2, true, v), opt);
  ASSERT_EQ(r.verdict, SosVerdict::Sos);
  EXPECT_FALSE(r.certificate->exact.has_value());
  const auto exact = rationalize(*r.certificate, f);
  ASSERT_TRUE(exact.has_value());
  EXPECT_TRUE(exact->exact_verified);
  RationalPolynomial sum(v);
  for (const auto& s : exact->squares) sum += RationalPolynomial::constant(v, s.weight) * s.multiplier * s.q * s.q;
  EXPECT_EQ(sum, f);
}

TEST(Sos, ResultJson) {
  const std::vector<std::string> v{"x"};
  const SosResult r = sos_decide(P("x^2+2*x+1", v), Subspace(v, {P("1", v), P("x", v)}));
  const json j = to_json(r);
  EXPECT_EQ(j.at("verdict"), "sos");
  EXPECT_EQ(to_json(r).dump(), j.dump());
}
