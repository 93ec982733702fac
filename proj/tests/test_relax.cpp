#include <gtest/gtest.h>

#include "shadowlab/catalog.hpp"
#include "shadowlab/relax.hpp"
#include "shadowlab/serialize.hpp"
#include "test_util.hpp"

using namespace shadowlab;
using namespace shadowlab::testing;
using Eigen::VectorXd;

namespace {

RationalPolynomial P(const std::string& s, const std::vector<std::string>& vars) { return parse_polynomial(s, vars); }

const std::vector<std::string> X{"x"};
const std::vector<std::string> X12{"x1", "x2"};

BasicClosedSet interval() { return make_set(X, {P("1 - x^2", X)}); }
RelaxationSpec interval_spec() { return {Subspace(X, {P("x", X)}), {Subspace(X, {P("1", X), P("x", X)}), Subspace(X, {P("1", X)})}}; }

BasicClosedSet disk() { return make_set(X12, {P("1 - x1^2 - x2^2", X12)}); }
RelaxationSpec disk_spec() {
  return {Subspace(X12, {P("x1", X12), P("x2", X12)}),
          {Subspace(X12, {P("1", X12), P("x1", X12), P("x2", X12)}), Subspace(X12, {P("1", X12)})}};
}

VectorXd v1(double a) { return VectorXd::Constant(1, a); }
VectorXd v2(double a, double b) {
  VectorXd v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(KPrime, IntervalMembershipExamples) {
  const MomentShadow K = build_K_prime(interval(), interval_spec());
  EXPECT_EQ(K.dim(), 1);
  EXPECT_EQ(k_prime_member(K, v1(1.5)), Membership::Out);
  EXPECT_NE(k_prime_member(K, v1(1.0)), Membership::Out);
  EXPECT_EQ(k_prime_member(K, v1(0.0)), Membership::In);
  EXPECT_EQ(k_prime_member(K, v1(-1.5)), Membership::Out);
}

TEST(KPrime, IntervalGrid) {
  const MomentShadow K = build_K_prime(interval(), interval_spec());
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double l = -1.5 + 3.0 * (i + 0.5) / 1000;
    const Membership m = k_prime_member(K, v1(l));
    if (std::abs(l) < 1 - 1e-6 && m != Membership::In) ++bad;
    if (std::abs(l) > 1 + 1e-6 && m != Membership::Out) ++bad;
  }
  EXPECT_EQ(bad, 0);
}

TEST(KPrime, DiskBoundary) {
  const MomentShadow K = build_K_prime(disk(), disk_spec());
  double worst = 0.0;
  for (int i = 0; i < 360; ++i) {
    const double th = 2 * M_PI * i / 360;
    const SupportResult s = support(K.shadow, v2(std::cos(th), std::sin(th)));
    ASSERT_EQ(s.status, SdpStatus::Optimal);
    worst = std::max(worst, std::abs(s.value - 1.0));
  }
  EXPECT_LE(worst, 1e-6);
  EXPECT_EQ(k_prime_member(K, v2(0.6, 0.7)), Membership::In);
  EXPECT_EQ(k_prime_member(K, v2(0.8, 0.7)), Membership::Out);
}

TEST(KPrime, SoundnessOnSampledPoints) {
  std::mt19937_64 rng(41);
  const struct {
    BasicClosedSet S;
    RelaxationSpec spec;
  } cases[] = {{interval(), interval_spec()}, {disk(), disk_spec()}};
  for (const auto& c : cases) {
    const MomentShadow K = build_K_prime(c.S, c.spec);
    const auto pts = c.S.sample(1000, rng);
    ASSERT_EQ(pts.size(), 1000u);
    int notin = 0;
    for (const auto& p : pts) notin += k_prime_member(K, evaluation_functional(c.spec.L, p)) != Membership::In;
    EXPECT_EQ(notin, 0);
  }
}

TEST(KPrime, EnlargingWShrinks) {
  const auto L = monomial_subspace(2, 2, false, X12);
  const RelaxationSpec small{L, {monomial_subspace(2, 1, true, X12), Subspace(X12, {P("1", X12)})}};
  const RelaxationSpec big{L, {monomial_subspace(2, 2, true, X12), monomial_subspace(2, 1, true, X12)}};
  const MomentShadow Ks = build_K_prime(disk(), small), Kb = build_K_prime(disk(), big);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.2, 1.2), w(0.0, 1.2);
  int in_big = 0;
  for (int k = 0; k < 1000; ++k) {
    // lambda on (x1, x2, x1^2, x1 x2, x2^2), skewed toward plausible moments.
    const double a = u(rng), b = u(rng);
    VectorXd l(5);
    l << a, b, a * a + w(rng) * 0.3, a * b + u(rng) * 0.2, b * b + w(rng) * 0.3;
    const Membership mb = k_prime_member(Kb, l);
    if (mb != Membership::In) continue;
    ++in_big;
    EXPECT_NE(k_prime_member(Ks, l), Membership::Out) << l.transpose();
  }
  EXPECT_GT(in_big, 0);
}

TEST(Probe, IntervalIsExact) {
  const ProbeReport r = exactness_probe(interval(), interval_spec(), 10);
  EXPECT_EQ(r.entries.size(), 10u);
  EXPECT_LE(r.max_gap, 1e-6);
  EXPECT_EQ(r.failures, 0);
}

TEST(Probe, ZeroBudgetIsEmpty) {
  const ProbeReport r = exactness_probe(interval(), interval_spec(), 0);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_EQ(r.max_gap, 0.0);
}

TEST(Probe, LowLevelBallHasGap) {
  const auto L6 = monomial_subspace(2, 6, false, X12);
  const RelaxationSpec spec{L6, {monomial_subspace(2, 3, true, X12), monomial_subspace(2, 2, true, X12)}};
  const ProbeReport r = exactness_probe(disk(), spec, 3);
  EXPECT_GT(r.max_gap, 0.0);
}

TEST(Umker, IdentityMapMatchesMomentBuilder) {
  const Subspace L2(X, {P("x", X), P("x^2", X)});
  const Subspace U(X, {P("1", X), P("x", X)});
  const MomentShadow Ku = umker_shadow(L2, {plain_map({P("x", X)}, U)});
  const MomentShadow Ku2 = umker_shadow(L2, {plain_map({P("x", X)}, U), plain_map({P("x", X)}, U)});
  const MomentShadow Kk = build_K_prime(make_set(X, {}), RelaxationSpec{L2, {U}});
  int disagree = 0;
  for (int i = 0; i < 100; ++i) {
    const VectorXd f = v2(-2 + 4.0 * (i % 10) / 9, -0.5 + 3.0 * (i / 10) / 9);
    const Membership a = k_prime_member(Ku, f), b = k_prime_member(Kk, f), c = k_prime_member(Ku2, f);
    disagree += (a != b) + (a != c);
  }
  EXPECT_EQ(disagree, 0);
}

TEST(Umker, SquareMapGivesRay) {
  const std::vector<std::string> z{"z"};
  const MomentShadow K = umker_shadow(Subspace(X, {P("x", X)}), {plain_map({P("z^2", z)}, Subspace(z, {P("1", z), P("z", z)}))});
  EXPECT_EQ(k_prime_member(K, v1(-0.5)), Membership::Out);
  EXPECT_NE(k_prime_member(K, v1(0.0)), Membership::Out);
  EXPECT_EQ(k_prime_member(K, v1(0.5)), Membership::In);
  EXPECT_EQ(k_prime_member(K, v1(100.0)), Membership::In);
}

TEST(Umker, PreconditionNamesOffender) {
  const std::vector<std::string> z{"z"};
  try {
    umker_shadow(Subspace(X, {P("x^3", X)}), {plain_map({P("z", z)}, Subspace(z, {P("1", z), P("z", z)}))});
    FAIL() << "expected an error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("x^3"), std::string::npos) << e.what();
  }
}

TEST(Umker, SoundnessOnDisk) {
  // Lasserre data as weighted blocks on the identity map.
  const RelaxationSpec spec = disk_spec();
  PullbackMap map = plain_map({P("x1", X12), P("x2", X12)}, spec.W[0]);
  map.blocks.push_back({P("1 - x1^2 - x2^2", X12), spec.W[1].basis()});
  const MomentShadow Ku = umker_shadow(spec.L, {map});
  const MomentShadow Kk = build_K_prime(disk(), spec);
  std::mt19937_64 rng(43);
  for (const auto& p : disk().sample(200, rng)) EXPECT_EQ(k_prime_member(Ku, evaluation_functional(spec.L, p)), Membership::In);
  std::uniform_real_distribution<double> u(-1.3, 1.3);
  int disagree = 0;
  for (int k = 0; k < 100; ++k) {
    const VectorXd l = v2(u(rng), u(rng));
    const Membership a = k_prime_member(Ku, l), b = k_prime_member(Kk, l);
    if (a != Membership::Borderline && b != Membership::Borderline) disagree += a != b;
  }
  EXPECT_EQ(disagree, 0);
}

TEST(HullCheck, Examples) {
  const HullCheck out = hull_certificate_check(v1(2.0), interval(), interval_spec().L, 5);
  ASSERT_TRUE(out.found);
  EXPECT_LT(out.value, 0.0);
  EXPECT_GE(out.min_sampled, -1e-9);
  // g is a positive multiple of 1 - x.
  const auto g = out.g;
  EXPECT_EQ(g.coeff(Monomial{0}), -g.coeff(Monomial{1}));
  EXPECT_GT(g.coeff(Monomial{0}), 0);

  const HullCheck d = hull_certificate_check(v2(1.2, 0), disk(), disk_spec().L, 5);
  ASSERT_TRUE(d.found);
  EXPECT_LT(d.value, 0.0);
  EXPECT_EQ(d.g.coeff(Monomial{0, 1}), 0);
  EXPECT_EQ(d.g.coeff(Monomial{0, 0}), -d.g.coeff(Monomial{1, 0}));

  EXPECT_FALSE(hull_certificate_check(v1(0.3), interval(), interval_spec().L, 5).found);
  EXPECT_FALSE(hull_certificate_check(v2(0.2, -0.5), disk(), disk_spec().L, 5).found);
}

TEST(Relax, SetValidationAndJson) {
  EXPECT_THROW(make_set(X, {P("x1", X12)}), std::invalid_argument);
  const BasicClosedSet S = set_from_json(json::parse(R"({"vars": ["x"], "h": ["1 - x^2"], "box": 1})"));
  EXPECT_TRUE(S.contains({0.5}));
  EXPECT_FALSE(S.contains({1.5}));
  const json j = to_json(exactness_probe(interval(), interval_spec(), 2));
  EXPECT_EQ(j.at("entries").size(), 2u);
}
