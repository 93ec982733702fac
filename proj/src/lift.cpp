#include "shadowlab/lift.hpp"

#include <cmath>
#include <random>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Shortest rational that reads back as the same double (0.3 -> 3/10).
Rational snap(double x) {
  Rational q = approximate_rational(x, 1000000);
  return to_double(q) == x ? q : exact_rational(x);
}

RationalMatrix exact_matrix(const MatrixXd& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = snap(m(i, j));
  return out;
}

RationalMatrix exact_symmetric(const MatrixXd& m) {
  RationalMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i; j < m.cols(); ++j) out(i, j) = out(j, i) = exact_rational(0.5 * (m(i, j) + m(j, i)));
  return out;
}

// <B, Z^2> for a rational symmetric B.
RationalPolynomial pair_with_z_squared(const LiftData& lift, const RationalMatrix& B) {
  const auto Z = lift.Z();
  RationalPolynomial out(lift.vars);
  for (int m = 0; m < lift.d; ++m)
    for (int n = 0; n < lift.d; ++n) {
      if (B(m, n) == 0) continue;
      RationalPolynomial z2(lift.vars);
      for (int k = 0; k < lift.d; ++k) z2 += Z[n][k] * Z[k][m];
      out += z2 * B(m, n);
    }
  return out;
}

// Rounds B, projects onto {<B, F_k> = c_k} exactly and checks PSD.
std::optional<RationalMatrix> round_trace_solution(const MatrixXd& B, const std::vector<RationalMatrix>& F,
                                                   const std::vector<Rational>& c) {
  const int d = static_cast<int>(B.rows());
  const int nc = d * (d + 1) / 2;
  RationalMatrix R(static_cast<Eigen::Index>(F.size()), nc + 1);
  for (std::size_t k = 0; k < F.size(); ++k) {
    int idx = 0;
    for (int q = 0; q < d; ++q)
      for (int p = 0; p <= q; ++p) R(static_cast<Eigen::Index>(k), idx++) = p == q ? F[k](p, p) : Rational(2 * F[k](p, q));
    R(static_cast<Eigen::Index>(k), nc) = c[k];
  }
  RowEchelon e = row_reduce(R);
  for (int p : e.pivots)
    if (p == nc) return std::nullopt;
  const RationalMatrix Ri = e.reduced.leftCols(nc);
  const RationalVector fi = e.reduced.col(nc);
  for (std::int64_t bound : {std::int64_t{1000000}, std::int64_t{1000000000}}) {
    RationalVector h(nc);
    int idx = 0;
    for (int q = 0; q < d; ++q)
      for (int p = 0; p <= q; ++p) h(idx++) = approximate_rational(B(p, q), bound);
    if (Ri.rows() > 0) {
      auto corr = solve(RationalMatrix(Ri * Ri.transpose()), RationalVector(Ri * h - fi));
      if (!corr) continue;
      h -= Ri.transpose() * *corr;
    }
    RationalMatrix Bx(d, d);
    idx = 0;
    for (int q = 0; q < d; ++q)
      for (int p = 0; p <= q; ++p) {
        Bx(p, q) = Bx(q, p) = h(idx);
        ++idx;
      }
    if (factor_psd(Bx)) return Bx;
  }
  return std::nullopt;
}

}  // namespace

Pencil LiftData::pencil() const {
  std::vector<MatrixXd> Md, Nd;
  for (const auto& m : M) Md.push_back(to_double(m));
  for (const auto& n : N) Nd.push_back(to_double(n));
  return conic_pencil(std::move(Md), std::move(Nd));
}

std::vector<std::vector<RationalPolynomial>> LiftData::Z() const {
  std::vector<std::vector<RationalPolynomial>> out(d, std::vector<RationalPolynomial>(d, RationalPolynomial(vars)));
  int idx = 0;
  for (int m = 0; m < d; ++m)
    for (int n = m; n < d; ++n) {
      out[m][n] = out[n][m] = RationalPolynomial::variable(vars, z_vars[idx]);
      ++idx;
    }
  return out;
}

LiftData build_lift(const std::vector<MatrixXd>& M, const std::vector<MatrixXd>& N, const ShadowOptions& opt) {
  const Pencil pen = conic_pencil(M, N);
  auto sp = strict_point(Shadow(pen), opt);
  if (!sp) {
    throw NotStrictlyFeasibleError(
        "build_lift: the pencil has no strictly feasible point; pass a homogeneous pencil whose cone spans the "
        "ambient space (restrict to the linear hull of the cone first)");
  }
  LiftData L;
  L.d = pen.dim();
  for (const auto& m : M) L.M.push_back(exact_matrix(m));
  for (const auto& n : N) L.N.push_back(exact_matrix(n));
  for (int i = 0; i < pen.n(); ++i) L.x_vars.push_back("x" + std::to_string(i + 1));
  for (int j = 0; j < pen.m(); ++j) L.y_vars.push_back("y" + std::to_string(j + 1));
  for (int m = 0; m < L.d; ++m)
    for (int n = m; n < L.d; ++n) L.z_vars.push_back("z_" + std::to_string(m + 1) + "_" + std::to_string(n + 1));
  L.vars = L.x_vars;
  L.vars.insert(L.vars.end(), L.y_vars.begin(), L.y_vars.end());
  L.vars.insert(L.vars.end(), L.z_vars.begin(), L.z_vars.end());
  std::vector<RationalPolynomial> zs;
  for (const auto& z : L.z_vars) zs.push_back(RationalPolynomial::variable(L.vars, z));
  L.U = Subspace(L.vars, zs);
  L.witness_xi = sp->xi;
  L.witness_eta = sp->eta;
  L.witness_min_eig = sp->lambda;
  const auto Z = L.Z();
  for (int m = 0; m < L.d; ++m)
    for (int n = m; n < L.d; ++n) {
      RationalPolynomial r(L.vars);
      for (int k = 0; k < L.d; ++k) r += Z[m][k] * Z[k][n];
      for (std::size_t i = 0; i < L.M.size(); ++i) r -= RationalPolynomial::variable(L.vars, L.x_vars[i]) * L.M[i](m, n);
      for (std::size_t j = 0; j < L.N.size(); ++j) r -= RationalPolynomial::variable(L.vars, L.y_vars[j]) * L.N[j](m, n);
      L.relations.push_back(std::move(r));
    }
  return L;
}

RationalPolynomial core_identity_residual(const LiftData& lift, const RationalMatrix& V) {
  const auto Z = lift.Z();
  RationalPolynomial lhs(lift.vars);
  for (int m = 0; m < lift.d; ++m)
    for (int n = 0; n < lift.d; ++n) {
      RationalPolynomial e(lift.vars);
      for (int k = 0; k < lift.d; ++k)
        if (V(k, n) != 0) e += Z[m][k] * V(k, n);
      lhs += e * e;
    }
  return lhs - pair_with_z_squared(lift, RationalMatrix(V * V));
}

LiftResult lift_certificate(const LiftData& lift, const VectorXd& a, const ShadowOptions& opt) {
  if (a.size() != static_cast<Eigen::Index>(lift.M.size())) throw std::invalid_argument("lift_certificate: functional has wrong length");
  LiftResult res;
  const DualMembership dm = dual_cone_member(lift.pencil(), a, opt, true);
  if (!dm.in_dual) {
    res.xi = dm.xi;
    res.eta = dm.eta;
    return res;
  }
  res.nonnegative = true;
  LiftCertificate cert;
  cert.a = a;
  cert.B = dm.B;

  std::vector<RationalMatrix> F;
  std::vector<Rational> c;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    F.push_back(lift.M[i]);
    c.push_back(snap(a(i)));
  }
  for (const auto& n : lift.N) {
    F.push_back(n);
    c.emplace_back(0);
  }
  if (auto Bx = round_trace_solution(dm.B, F, c)) {
    cert.exact = true;
    cert.B_exact = *Bx;
    cert.B = to_double(*Bx);
    const auto fac = factor_psd(*Bx);
    const auto Z = lift.Z();
    RationalPolynomial total(lift.vars);
    for (std::size_t k = 0; k < fac->weights.size(); ++k)
      for (int m = 0; m < lift.d; ++m) {
        RationalPolynomial q(lift.vars);
        for (int n = 0; n < lift.d; ++n)
          if (fac->vectors[k](n) != 0) q += Z[m][n] * fac->vectors[k](n);
        if (q.is_zero()) continue;
        total += q * q * fac->weights[k];
        cert.exact_squares.push_back({fac->weights[k], std::move(q)});
      }
    if (total != pair_with_z_squared(lift, *Bx)) throw std::logic_error("lift_certificate: exact squares do not expand to <B, Z^2>");
    RationalPolynomial pairing(lift.vars), target(lift.vars);
    for (std::size_t i = 0; i < lift.M.size(); ++i) {
      const auto xv = RationalPolynomial::variable(lift.vars, lift.x_vars[i]);
      pairing += xv * Rational((*Bx).cwiseProduct(lift.M[i]).sum());
      target += xv * c[i];
    }
    for (std::size_t j = 0; j < lift.N.size(); ++j)
      pairing += RationalPolynomial::variable(lift.vars, lift.y_vars[j]) * Rational((*Bx).cwiseProduct(lift.N[j]).sum());
    cert.trace_identity = pairing == target;
  }

  cert.V = psd_sqrt(cert.B, opt.sdp.tol_psd);
  cert.sqrt_residual = (cert.V * cert.V - cert.B).cwiseAbs().maxCoeff();
  const RationalMatrix Vr = exact_symmetric(cert.V);
  const auto Z = lift.Z();
  for (int m = 0; m < lift.d; ++m)
    for (int n = 0; n < lift.d; ++n) {
      RationalPolynomial e(lift.vars);
      for (int k = 0; k < lift.d; ++k)
        if (Vr(k, n) != 0) e += Z[m][k] * Vr(k, n);
      cert.squares.push_back(std::move(e));
    }
  cert.core_identity = core_identity_residual(lift, Vr).is_zero();
  if (!cert.core_identity) throw std::logic_error("lift_certificate: core identity failed");
  res.certificate = std::move(cert);
  return res;
}

double verify_lift_numeric(const LiftData& lift, const LiftCertificate& cert, int samples, std::uint64_t seed) {
  const Pencil pen = lift.pencil();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  int got = 0;
  for (long long t = 0; t < 1000LL * std::max(samples, 1) && got < samples; ++t) {
    VectorXd xi(pen.n()), eta(pen.m());
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = gauss(rng);
    for (Eigen::Index j = 0; j < eta.size(); ++j) eta(j) = gauss(rng);
    const MatrixXd W = pencil_eval(pen, xi, eta);
    if (min_eig(W) < 0) continue;
    ++got;
    const MatrixXd A = psd_sqrt(W);
    const double lhs = cert.a.dot(xi);
    const double rhs = (A * cert.V).squaredNorm();
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

}  // namespace shadowlab
