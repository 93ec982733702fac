#include <gtest/gtest.h>

#include "shadowlab/serialize.hpp"
#include "shadowlab/spectra.hpp"
#include "test_util.hpp"

using namespace shadowlab;
using namespace shadowlab::testing;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Shadow disk() {
  Pencil p;
  p.A = MatrixXd::Identity(2, 2);
  const auto m = disk_cone_matrices();
  p.B = {m[1], m[2]};
  return Shadow(p);
}

VectorXd vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Random point of the cone given by a homogeneous pencil, by rejection.
VectorXd cone_point(const Pencil& p, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  for (;;) {
    VectorXd xi(p.n());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = g(rng);
    if (min_eig(pencil_eval(p, xi)) >= 0) return xi;
  }
}

}  // namespace

TEST(Pencil, Evaluation) {
  Pencil p;
  p.A = MatrixXd::Identity(2, 2);
  EXPECT_TRUE(pencil_eval(p, VectorXd()).isApprox(MatrixXd::Identity(2, 2)));
  const Pencil q = conic_pencil(psd2_matrices());
  EXPECT_TRUE(pencil_eval(q, vec({1, 0, 1})).isApprox(MatrixXd::Identity(2, 2)));
  EXPECT_THROW(pencil_eval(q, vec({1, 0})), std::invalid_argument);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  Pencil r;
  r.A = random_psd(rng, 3);
  for (int i = 0; i < 2; ++i) r.B.push_back(random_psd(rng, 3) - random_psd(rng, 3));
  for (int k = 0; k < 20; ++k) {
    const VectorXd a = vec({g(rng), g(rng)}), b = vec({g(rng), g(rng)});
    const MatrixXd lin = pencil_eval(r, a + b) - pencil_eval(r, a) - pencil_eval(r, b) + r.A;
    EXPECT_LE(lin.norm(), 1e-12);
  }
}

TEST(Shadow, DiskMembership) {
  const Shadow s = disk();
  EXPECT_EQ(shadow_contains(s, vec({0, 0})).verdict, Membership::In);
  const MembershipResult out = shadow_contains(s, vec({2, 0}));
  EXPECT_EQ(out.verdict, Membership::Out);
  EXPECT_GE(min_eig(out.separator), -1e-9);
  EXPECT_EQ(shadow_contains(s, vec({1, 0})).verdict, Membership::Borderline);
}

TEST(Shadow, ProjectionOfDisk) {
  MatrixXd T(1, 2);
  T << 1, 0;
  const Shadow line = linear_image(disk(), T);
  EXPECT_EQ(shadow_contains(line, vec({0.9})).verdict, Membership::In);
  EXPECT_EQ(shadow_contains(line, vec({0.99})).verdict, Membership::In);
  EXPECT_EQ(shadow_contains(line, vec({-0.99})).verdict, Membership::In);
  EXPECT_EQ(shadow_contains(line, vec({1.01})).verdict, Membership::Out);
  EXPECT_EQ(shadow_contains(line, vec({-1.01})).verdict, Membership::Out);
}

TEST(Shadow, StrictPoint) {
  MatrixXd one = MatrixXd::Identity(1, 1);
  auto sp = strict_point(Shadow(conic_pencil({one})));
  ASSERT_TRUE(sp.has_value());
  EXPECT_NEAR(sp->lambda, 1.0, 1e-6);
  auto sp2 = strict_point(Shadow(conic_pencil(psd2_matrices())));
  ASSERT_TRUE(sp2.has_value());
  EXPECT_GE(min_eig(pencil_eval(Shadow(conic_pencil(psd2_matrices())).pencil(), sp2->xi)), 0.5);
  MatrixXd d = MatrixXd::Zero(2, 2);
  d.diagonal() << 1, -1;
  EXPECT_FALSE(strict_point(Shadow(conic_pencil({d}))).has_value());
}

TEST(Shadow, HomogenizeIntersect) {
  const Shadow h = homogenize_shadow(disk());
  EXPECT_TRUE(h.is_cone());
  EXPECT_EQ(shadow_contains(h, vec({1, 0.5, 0})).verdict, Membership::In);
  EXPECT_EQ(shadow_contains(h, vec({2, 1, 0})).verdict, Membership::In);
  Pencil half;
  half.A = MatrixXd::Zero(1, 1);
  half.B = {MatrixXd::Identity(1, 1), MatrixXd::Zero(1, 1)};
  const Shadow both = intersect(disk(), Shadow(half));
  EXPECT_EQ(shadow_contains(both, vec({0.5, 0.5})).verdict, Membership::In);
  EXPECT_EQ(shadow_contains(both, vec({-0.5, 0})).verdict, Membership::Out);
  EXPECT_THROW(intersect(disk(), Shadow(conic_pencil({MatrixXd::Identity(1, 1)}))), std::invalid_argument);
}

TEST(Shadow, HomogenizationAgreesWithOriginal) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  const Shadow s = disk(), h = homogenize_shadow(disk());
  int agree = 0, total = 0;
  for (int k = 0; k < 1000; ++k) {
    const VectorXd xi = vec({u(rng), u(rng)});
    const Membership a = shadow_contains(s, xi).verdict;
    if (a == Membership::Borderline) continue;
    ++total;
    agree += shadow_contains(h, vec({1, xi(0), xi(1)})).verdict == a;
  }
  EXPECT_EQ(agree, total);
}

TEST(Shadow, IntersectionIsConjunction) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  Pencil half;
  half.A = MatrixXd::Constant(1, 1, 0.25);
  half.B = {MatrixXd::Identity(1, 1), MatrixXd::Identity(1, 1)};
  const Shadow a = disk(), b(half), both = intersect(a, b);
  for (int k = 0; k < 1000; ++k) {
    const VectorXd xi = vec({u(rng), u(rng)});
    const Membership ma = shadow_contains(a, xi).verdict, mb = shadow_contains(b, xi).verdict;
    if (ma == Membership::Borderline || mb == Membership::Borderline) continue;
    const Membership m = shadow_contains(both, xi).verdict;
    if (m == Membership::Borderline) continue;
    EXPECT_EQ(m == Membership::In, ma == Membership::In && mb == Membership::In);
  }
}

TEST(Shadow, SupportOfDisk) {
  for (int k = 0; k < 36; ++k) {
    const double th = 2 * M_PI * k / 36;
    const SupportResult r = support(disk(), vec({std::cos(th), std::sin(th)}));
    ASSERT_EQ(r.status, SdpStatus::Optimal);
    EXPECT_NEAR(r.value, 1.0, 1e-6);
  }
}

TEST(DualCone, PointExamples) {
  const Pencil ray = conic_pencil({MatrixXd::Identity(1, 1)});
  EXPECT_NEAR(dual_cone_point(ray, MatrixXd::Constant(1, 1, 2.0))(0), 2.0, 1e-15);
  const VectorXd p = dual_cone_point(conic_pencil(psd2_matrices()), MatrixXd::Identity(2, 2));
  EXPECT_TRUE(p.isApprox(vec({1, 0, 1})));
  EXPECT_THROW(dual_cone_point(ray, MatrixXd::Constant(1, 1, -1.0)), std::domain_error);
}

TEST(DualCone, MemberExamples) {
  const Pencil ray = conic_pencil({MatrixXd::Identity(1, 1)});
  const DualMembership r = dual_cone_member(ray, vec({3}));
  ASSERT_TRUE(r.in_dual);
  EXPECT_NEAR(r.B(0, 0), 3.0, 1e-7);
  const Pencil psd = conic_pencil(psd2_matrices());
  const DualMembership i = dual_cone_member(psd, vec({1, 0, 1}));
  ASSERT_TRUE(i.in_dual);
  EXPECT_NEAR(i.B(0, 0), 1.0, 1e-7);
  EXPECT_NEAR(i.B(1, 1), 1.0, 1e-7);
  EXPECT_TRUE(dual_cone_member(psd, vec({1, 2, 1})).in_dual);
  const DualMembership o = dual_cone_member(psd, vec({1, 3, 1}));
  ASSERT_FALSE(o.in_dual);
  EXPECT_LT(o.xi.dot(vec({1, 3, 1})), 0.0);
  EXPECT_GE(min_eig(pencil_eval(psd, o.xi)), -1e-8);
  MatrixXd d = MatrixXd::Zero(2, 2);
  d.diagonal() << 1, -1;
  EXPECT_THROW(dual_cone_member(conic_pencil({d}), vec({1})), NotStrictlyFeasibleError);
}

TEST(DualCone, SoundnessOnSampledPairs) {
  std::mt19937_64 rng(4);
  for (const auto& ms : {psd2_matrices(), disk_cone_matrices()}) {
    const Pencil p = conic_pencil(ms);
    double worst = 0.0;
    for (int k = 0; k < 10000; ++k) {
      const VectorXd a = dual_cone_point(p, random_psd(rng, 2));
      worst = std::min(worst, a.dot(cone_point(p, rng)));
    }
    EXPECT_GE(worst, -1e-8);
  }
}

TEST(DualCone, MemberRecoversDualPoints) {
  std::mt19937_64 rng(5);
  const Pencil p = conic_pencil(psd2_matrices());
  for (int k = 0; k < 200; ++k) {
    const VectorXd a = dual_cone_point(p, random_psd(rng, 2));
    EXPECT_TRUE(dual_cone_member(p, a).in_dual);
  }
}

TEST(DualCone, PencilJson) {
  const Pencil p = conic_pencil(disk_cone_matrices());
  const Pencil q = pencil_from_json(json::parse(to_json(p).dump()));
  EXPECT_EQ(q.n(), 3);
  EXPECT_TRUE(q.B[1].isApprox(p.B[1]));
  const Pencil f = pencil_from_json(json::parse(R"({"d": 2, "B": [[1,0,0,0], [0,1,1,0], [0,0,0,1]]})"));
  EXPECT_TRUE(f.B[1].isApprox(psd2_matrices()[1]));
  EXPECT_TRUE(f.A.isZero());
}
