#include <gtest/gtest.h>

#include "shadowlab/lift.hpp"
#include "shadowlab/serialize.hpp"
#include "test_util.hpp"

using namespace shadowlab;
using namespace shadowlab::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

LiftData ray() { return build_lift({MatrixXd::Identity(1, 1)}); }

RationalPolynomial expand(const LiftData& L, const LiftCertificate& c) {
  RationalPolynomial s(L.vars);
  for (const auto& q : c.exact_squares) s += RationalPolynomial::constant(L.vars, q.weight) * q.q * q.q;
  return s;
}

RationalPolynomial sum_of_z_squares(const LiftData& L) {
  RationalPolynomial s(L.vars);
  const auto Z = L.Z();
  for (const auto& row : Z)
    for (const auto& z : row) s += z * z;
  return s;
}

}  // namespace

TEST(Lift, RayStructure) {
  const LiftData L = ray();
  EXPECT_EQ(L.z_vars.size(), 1u);
  EXPECT_EQ(L.U.dim(), 1);
  ASSERT_EQ(L.relations.size(), 1u);
  EXPECT_EQ(L.relations[0], RationalPolynomial::variable(L.vars, L.z_vars[0]) * RationalPolynomial::variable(L.vars, L.z_vars[0]) -
                                RationalPolynomial::variable(L.vars, L.x_vars[0]));
}

TEST(Lift, RayCertificate) {
  const LiftData L = ray();
  const LiftResult r = lift_certificate(L, vec({1}));
  ASSERT_TRUE(r.nonnegative);
  const LiftCertificate& c = *r.certificate;
  EXPECT_NEAR(c.B(0, 0), 1.0, 1e-7);
  EXPECT_TRUE(c.core_identity);
  EXPECT_TRUE(c.exact);
  EXPECT_TRUE(c.trace_identity);
  const auto z = RationalPolynomial::variable(L.vars, L.z_vars[0]);
  EXPECT_EQ(expand(L, c), z * z);
  EXPECT_LE(verify_lift_numeric(L, c, 1000), 1e-10);
}

TEST(Lift, RayNegativeFunctional) {
  const LiftResult r = lift_certificate(ray(), vec({-1}));
  ASSERT_FALSE(r.nonnegative);
  EXPECT_LT(-r.xi(0), 0.0);
  EXPECT_GT(r.xi(0), 0.0);
}

TEST(Lift, PsdTraceGivesSumOfSquares) {
  const LiftData L = build_lift(psd2_matrices());
  EXPECT_EQ(L.z_vars.size(), 3u);
  EXPECT_EQ(L.U.dim(), 3);
  EXPECT_EQ(L.relations.size(), 3u);
  const LiftResult r = lift_certificate(L, vec({1, 0, 1}));
  ASSERT_TRUE(r.nonnegative);
  const LiftCertificate& c = *r.certificate;
  EXPECT_TRUE(c.B.isApprox(MatrixXd::Identity(2, 2), 1e-7));
  EXPECT_TRUE(c.exact);
  EXPECT_EQ(expand(L, c), sum_of_z_squares(L));
  EXPECT_LE(verify_lift_numeric(L, c, 1000), 1e-9);
}

TEST(Lift, DiskCone) {
  const LiftData L = build_lift(disk_cone_matrices());
  EXPECT_GT(L.witness_min_eig, 0.0);
  EXPECT_TRUE(L.witness_xi.isApprox(vec({1, 0, 0})));
  const LiftResult r = lift_certificate(L, vec({1, 0, 0}));
  ASSERT_TRUE(r.nonnegative);
  const LiftCertificate& c = *r.certificate;
  EXPECT_TRUE(c.B.isApprox(MatrixXd::Identity(2, 2) / 2, 1e-7));
  EXPECT_TRUE(c.V.isApprox(MatrixXd::Identity(2, 2) / std::sqrt(2.0), 1e-6));
  EXPECT_TRUE(c.core_identity);
  EXPECT_LE(verify_lift_numeric(L, c, 1000), 1e-8);
}

TEST(Lift, DiskConeOutsideDual) {
  const LiftData L = build_lift(disk_cone_matrices());
  const LiftResult r = lift_certificate(L, vec({1, 2, 0}));
  ASSERT_FALSE(r.nonnegative);
  EXPECT_LT(vec({1, 2, 0}).dot(r.xi), 0.0);
  EXPECT_GE(min_eig(pencil_eval(L.pencil(), r.xi, r.eta)), -1e-8);
}

TEST(Lift, NotStrictlyFeasible) {
  MatrixXd d = MatrixXd::Zero(2, 2);
  d.diagonal() << 1, -1;
  EXPECT_THROW(build_lift({d}), NotStrictlyFeasibleError);
}

TEST(Lift, CoreIdentityForRandomV) {
  std::mt19937_64 rng(51);
  for (const auto& ms : {psd2_matrices(), disk_cone_matrices()}) {
    const LiftData L = build_lift(ms);
    EXPECT_EQ(L.U.dim(), L.d * (L.d + 1) / 2);
    for (int t = 0; t < 20; ++t) {
      RationalMatrix V(L.d, L.d);
      for (int i = 0; i < L.d; ++i)
        for (int j = 0; j <= i; ++j) V(i, j) = V(j, i) = random_rational(rng);
      EXPECT_TRUE(core_identity_residual(L, V).is_zero());
    }
  }
}

TEST(Lift, UniformSquaresAndConicSoundness) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> g(0.0, 1.0);
  for (const auto& ms : {psd2_matrices(), disk_cone_matrices()}) {
    const LiftData L = build_lift(ms);
    const Pencil p = L.pencil();
    // Cone points by rejection.
    std::vector<VectorXd> pts;
    while (pts.size() < 10000) {
      VectorXd xi(p.n());
      for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = g(rng);
      if (min_eig(pencil_eval(p, xi)) >= 0) pts.push_back(xi);
    }
    for (int t = 0; t < 5; ++t) {
      const VectorXd a = dual_cone_point(p, random_psd(rng, L.d));
      const LiftResult r = lift_certificate(L, a);
      ASSERT_TRUE(r.nonnegative);
      const LiftCertificate& c = *r.certificate;
      EXPECT_TRUE(c.core_identity);
      for (const auto& s : c.squares) {
        EXPECT_TRUE(L.U.contains(s)) << to_string(s);
      }
      for (const auto& q : c.exact_squares) {
        EXPECT_TRUE(L.U.contains(q.q));
      }
      double worst = 0.0;
      for (const auto& xi : pts) worst = std::min(worst, a.dot(xi));
      EXPECT_GE(worst, -1e-8);
      EXPECT_LE(verify_lift_numeric(L, c, 1000, static_cast<std::uint64_t>(t)), 1e-8);
    }
  }
}

TEST(Lift, Json) {
  const LiftData L = ray();
  const json j = to_json(lift_certificate(L, vec({2})));
  EXPECT_TRUE(j.at("nonnegative").get<bool>());
  EXPECT_EQ(to_json(L).at("z_vars").size(), 1u);
}
