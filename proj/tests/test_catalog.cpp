#include <gtest/gtest.h>

#include <boost/math/special_functions/binomial.hpp>

#include "shadowlab/catalog.hpp"
#include "shadowlab/serialize.hpp"
#include "test_util.hpp"

using namespace shadowlab;
using namespace shadowlab::testing;

namespace {

RationalPolynomial P(const std::string& s, std::vector<std::string> vars = {}) { return parse_polynomial(s, std::move(vars)); }

long long binom(int n, int k) { return std::llround(boost::math::binomial_coefficient<double>(n, k)); }

Rational eval(const RationalPolynomial& f, const std::vector<Rational>& x) {
  std::map<std::string, RationalPolynomial> a;
  for (std::size_t i = 0; i < x.size(); ++i) a.emplace(f.vars()[i], RationalPolynomial::constant({}, x[i]));
  return substitute(f, a, {}).constant_term();
}

}  // namespace

TEST(Catalog, Forms) {
  const NamedForm m = catalog("motzkin");
  EXPECT_EQ(m.degree, 6);
  EXPECT_EQ(m.vars, (std::vector<std::string>{"x0", "x1", "x2"}));
  EXPECT_EQ(eval(m.polynomial, {1, 1, 1}), 0);
  EXPECT_EQ(eval(m.polynomial, {1, 2, 0}), 64);
  const NamedForm c = catalog("choi-lam");
  EXPECT_EQ(c.degree, 4);
  EXPECT_EQ(c.vars.size(), 4u);
  EXPECT_EQ(eval(c.polynomial, {1, 1, 1, 1}), 0);
  EXPECT_EQ(catalog_names(), (std::vector<std::string>{"motzkin", "choi-lam"}));
  try {
    catalog("robinson");
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("motzkin"), std::string::npos);
  }
}

TEST(Veronese, Examples) {
  EXPECT_TRUE(veronese(2, 2, std::vector<double>{1, 2}).isApprox(Eigen::Vector<double, 5>(1, 2, 1, 2, 4)));
  EXPECT_TRUE(veronese(3, 4, std::vector<double>{0, 0, 0}).isZero());
  EXPECT_EQ(veronese(2, 2, std::vector<Rational>{Rational(1, 2), Rational(3)}),
            (std::vector<Rational>{Rational(1, 2), 3, Rational(1, 4), Rational(3, 2), 9}));
  EXPECT_EQ(veronese(2, 2, std::vector<double>{1, 2}, true).size(), 3);
  EXPECT_THROW(veronese(2, 2, std::vector<double>{1}), std::invalid_argument);
}

TEST(Veronese, Dimensions) {
  for (int n = 1; n <= 6; ++n)
    for (int d = 1; d <= 6; ++d) {
      EXPECT_EQ(veronese_spec(n, d).N(), binom(n + d, n) - 1);
      EXPECT_EQ(veronese_spec(n, d, true).N(), binom(n + d - 1, d));
    }
  EXPECT_EQ(veronese_spec(3, 6).N(), 83);
  EXPECT_EQ(veronese_spec(4, 4).N(), 69);
  EXPECT_EQ(veronese_spec(2, 6).N(), 27);
}

TEST(L14, Membership) {
  const Subspace L = L14();
  EXPECT_EQ(L.dim(), 14);
  EXPECT_TRUE(L.contains(P("x^6", {"x", "y"})));
  EXPECT_TRUE(L.contains(P("x*y^2", {"x", "y"})));
  EXPECT_FALSE(L.contains(P("x^3*y", {"x", "y"})));
  EXPECT_FALSE(L.contains_one());
}

TEST(L14, ContainsShiftedMotzkin) {
  std::mt19937_64 rng(61);
  const NamedForm m = catalog("motzkin");
  const Subspace L = L14({"x1", "x2"});
  for (int t = 0; t < 100; ++t) {
    const std::vector<Rational> xi{random_rational(rng), random_rational(rng)};
    const Rational order(std::uniform_int_distribution<int>(1, 4)(rng), std::uniform_int_distribution<int>(1, 3)(rng));
    const PuiseuxPolynomial g = eps_shift(m.polynomial, xi, order);
    EXPECT_TRUE(L.contains(g)) << t;
  }
}

TEST(PsdVsSos, Separations) {
  for (auto [n, two_d, form] : std::vector<std::tuple<int, int, std::string>>{{3, 6, "motzkin"}, {4, 4, "choi-lam"}}) {
    const PsdSosReport r = psd_vs_sos_demo(n, two_d);
    EXPECT_TRUE(r.separation_expected);
    EXPECT_EQ(r.form, form);
    ASSERT_EQ(r.verdict, SosVerdict::NotSos);
    ASSERT_TRUE(r.witness.has_value());
    EXPECT_LE(r.witness->value, -1e-6);
    EXPECT_GE(r.witness->min_eig, -1e-9);
    EXPECT_EQ(r.dual_membership, Membership::In);
    EXPECT_EQ(r.moment_matrix_size, binom(n + two_d / 2 - 1, two_d / 2));
    EXPECT_EQ(r.moment_coordinates, binom(n + two_d - 1, two_d));
  }
}

TEST(PsdVsSos, HilbertCasesAndUnsupported) {
  for (auto [n, two_d] : std::vector<std::pair<int, int>>{{2, 4}, {3, 4}, {5, 2}}) {
    const PsdSosReport r = psd_vs_sos_demo(n, two_d);
    EXPECT_FALSE(r.separation_expected);
    EXPECT_FALSE(r.witness.has_value());
  }
  EXPECT_THROW(psd_vs_sos_demo(5, 6), std::invalid_argument);
}

TEST(Pipeline, LocalMotzkinOnBall) {
  const PipelineReport r = counterexample_pipeline("motzkin", unit_ball(3), PipelineMode::Local);
  EXPECT_EQ(r.L_dim, 83);
  EXPECT_EQ(r.entries.size(), 5u);
  EXPECT_EQ(r.obstructed, 5);
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.in_L);
    EXPECT_LE(e.witness_value, -1e-6);
  }
  EXPECT_GT(r.interior_fraction, 0.0);
}

TEST(Pipeline, InfinitesimalMotzkinOnSquare) {
  const PipelineReport r = counterexample_pipeline("motzkin", unit_cube(2), PipelineMode::Infinitesimal);
  EXPECT_EQ(r.L_dim, 14);
  EXPECT_EQ(r.obstructed, 5);
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.in_L);
    EXPECT_EQ(e.ring, "B[x1,x2]/<x1,x2>^7");
  }
}

TEST(Pipeline, ChoiLamLocalOnBall) {
  const PipelineReport r = counterexample_pipeline("choi-lam", unit_ball(4), PipelineMode::Local);
  EXPECT_EQ(r.L_dim, 69);
  EXPECT_EQ(r.obstructed, 5);
}

TEST(Pipeline, DimensionMismatchAndDeterminism) {
  EXPECT_THROW(counterexample_pipeline("motzkin", unit_ball(2), PipelineMode::Local), std::invalid_argument);
  PipelineOptions opt;
  opt.points = 2;
  const std::string a = to_json(counterexample_pipeline("motzkin", unit_cube(2), PipelineMode::Infinitesimal, opt)).dump();
  const std::string b = to_json(counterexample_pipeline("motzkin", unit_cube(2), PipelineMode::Infinitesimal, opt)).dump();
  EXPECT_EQ(a, b);
}
