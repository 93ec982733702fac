#include "shadowlab/spectra.hpp"

#include <cmath>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

bool is_symmetric(const MatrixXd& m) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + m.cwiseAbs().maxCoeff());
}

MatrixXd direct_sum(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out = MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

// max t  s.t.  A0 + sum v_i F_i - t I >= 0,  t <= 1,  |v_i| <= R.
// Dual variables y = (v, t); the primal X carries the separating matrix.
SdpSolution solve_margin(const MatrixXd& A0, const std::vector<MatrixXd>& F, const ShadowOptions& opt) {
  const int d = static_cast<int>(A0.rows());
  const int k = static_cast<int>(F.size());
  SdpProblem p;
  p.blocks = {d, 1};
  for (int i = 0; i < 2 * k; ++i) p.blocks.push_back(1);
  append_dense(p.C, 0, A0);
  p.C.push_back({1, 0, 0, 1.0});
  for (int i = 0; i < 2 * k; ++i) p.C.push_back({2 + i, 0, 0, opt.box});
  for (int i = 0; i < k; ++i) {
    SparseSym a;
    append_dense(a, 0, -F[i]);
    a.push_back({2 + 2 * i, 0, 0, 1.0});
    a.push_back({3 + 2 * i, 0, 0, -1.0});
    p.add_constraint(std::move(a), 0.0);
  }
  SparseSym at = from_dense(0, MatrixXd::Identity(d, d));
  at.push_back({1, 0, 0, 1.0});
  p.add_constraint(std::move(at), 1.0);
  return solve_sdp(p, opt.sdp);
}

}  // namespace

void Pencil::check() const {
  if (A.rows() < 1 || !is_symmetric(A)) throw std::invalid_argument("pencil: A must be a nonempty symmetric matrix");
  for (const auto& m : B)
    if (m.rows() != A.rows() || !is_symmetric(m)) throw std::invalid_argument("pencil: B_i must be symmetric of size d");
  for (const auto& m : C)
    if (m.rows() != A.rows() || !is_symmetric(m)) throw std::invalid_argument("pencil: C_j must be symmetric of size d");
}

Pencil conic_pencil(std::vector<MatrixXd> B, std::vector<MatrixXd> C) {
  if (B.empty()) throw std::invalid_argument("conic pencil needs at least one ambient matrix");
  Pencil p{MatrixXd::Zero(B[0].rows(), B[0].cols()), std::move(B), std::move(C)};
  p.check();
  return p;
}

MatrixXd pencil_eval(const Pencil& p, const VectorXd& xi, const VectorXd& eta) {
  if (xi.size() != p.n() || eta.size() != p.m()) throw std::invalid_argument("pencil_eval: dimension mismatch");
  MatrixXd out = p.A;
  for (int i = 0; i < p.n(); ++i) out += xi(i) * p.B[i];
  for (int j = 0; j < p.m(); ++j) out += eta(j) * p.C[j];
  return out;
}

MatrixXd pencil_eval(const Pencil& p, const VectorXd& xi) { return pencil_eval(p, xi, VectorXd::Zero(p.m())); }

Shadow::Shadow(Pencil p) : pencil_(std::move(p)) {
  pencil_.check();
  is_cone_ = pencil_.A.cwiseAbs().maxCoeff() == 0.0;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::In: return "In";
    case Membership::Out: return "Out";
    case Membership::Borderline: return "Borderline";
  }
  return "?";
}

MembershipResult shadow_contains(const Shadow& s, const VectorXd& xi, const ShadowOptions& opt) {
  const Pencil& p = s.pencil();
  const MatrixXd A0 = pencil_eval(p, xi);
  SdpSolution sol = solve_margin(A0, p.C, opt);
  MembershipResult r;
  r.status = sol.status;
  r.eta = VectorXd::Zero(p.m());
  if (sol.status != SdpStatus::Optimal) return r;
  r.eta = sol.y.head(p.m());
  // In is judged on the returned point itself, Out on the primal upper bound.
  const double achieved = min_eig(pencil_eval(p, xi, r.eta));
  r.margin = sol.dual_objective;
  r.separator = sol.X[0];
  if (achieved > opt.band) {
    r.verdict = Membership::In;
    r.margin = std::min(achieved, 1.0);
  } else if (sol.primal_objective < -opt.band) {
    r.verdict = Membership::Out;
    r.margin = sol.primal_objective;
  }
  return r;
}

SupportResult support(const Shadow& s, const VectorXd& c, const ShadowOptions& opt) {
  const Pencil& pen = s.pencil();
  if (c.size() != pen.n()) throw std::invalid_argument("support: direction has wrong length");
  const int k = pen.n() + pen.m();
  SdpProblem p;
  p.blocks = {pen.dim()};
  for (int i = 0; i < 2 * k; ++i) p.blocks.push_back(1);
  append_dense(p.C, 0, pen.A);
  for (int i = 0; i < 2 * k; ++i) p.C.push_back({1 + i, 0, 0, opt.box});
  for (int i = 0; i < k; ++i) {
    SparseSym a;
    append_dense(a, 0, -(i < pen.n() ? pen.B[i] : pen.C[i - pen.n()]));
    a.push_back({1 + 2 * i, 0, 0, 1.0});
    a.push_back({2 + 2 * i, 0, 0, -1.0});
    p.add_constraint(std::move(a), i < pen.n() ? c(i) : 0.0);
  }
  const SdpSolution sol = solve_sdp(p, opt.sdp);
  SupportResult r;
  r.status = sol.status;
  if (sol.status != SdpStatus::Optimal) return r;
  r.xi = sol.y.head(pen.n());
  r.eta = sol.y.tail(pen.m());
  r.value = c.dot(r.xi);
  r.upper_bound = sol.primal_objective;
  r.at_box = sol.y.size() > 0 && sol.y.cwiseAbs().maxCoeff() >= opt.box * (1.0 - 1e-6);
  return r;
}

std::optional<StrictPoint> strict_point(const Shadow& s, const ShadowOptions& opt) {
  const Pencil& p = s.pencil();
  std::vector<MatrixXd> F = p.B;
  F.insert(F.end(), p.C.begin(), p.C.end());
  SdpSolution sol = solve_margin(p.A, F, opt);
  if (sol.status != SdpStatus::Optimal)
    throw NumericalFailureError("strict_point: solver returned " + to_string(sol.status));
  StrictPoint pt;
  pt.xi = sol.y.head(p.n());
  pt.eta = sol.y.segment(p.n(), p.m());
  pt.lambda = min_eig(pencil_eval(p, pt.xi, pt.eta));
  if (pt.lambda > opt.strict_tol) {
    if (s.is_cone()) {
      // Rescale so that the smallest eigenvalue is 1.
      pt.xi /= pt.lambda;
      pt.eta /= pt.lambda;
      pt.lambda = min_eig(pencil_eval(p, pt.xi, pt.eta));
    }
    return pt;
  }
  if (sol.primal_objective <= opt.strict_tol) return std::nullopt;
  throw NumericalFailureError("strict_point: margin could not be resolved");
}

VectorXd dual_cone_point(const Pencil& cone, const MatrixXd& B, double tol_psd) {
  cone.check();
  if (cone.A.cwiseAbs().maxCoeff() != 0.0) throw std::invalid_argument("dual_cone_point: pencil must be homogeneous");
  if (cone.m() != 0) throw std::invalid_argument("dual_cone_point: pencil must have no lifted part");
  if (B.rows() != cone.dim() || !is_symmetric(B)) throw std::invalid_argument("dual_cone_point: B has wrong shape");
  if (min_eig(B) < -tol_psd) throw std::domain_error("dual_cone_point: B is not positive semidefinite");
  VectorXd out(cone.n());
  for (int i = 0; i < cone.n(); ++i) out(i) = inner(B, cone.B[i]);
  return out;
}

DualMembership dual_cone_member(const Pencil& cone, const VectorXd& a, const ShadowOptions& opt, bool center) {
  cone.check();
  if (cone.A.cwiseAbs().maxCoeff() != 0.0) throw std::invalid_argument("dual_cone_member: pencil must be homogeneous");
  if (a.size() != cone.n()) throw std::invalid_argument("dual_cone_member: functional has wrong length");
  if (!strict_point(Shadow(cone), opt)) {
    throw NotStrictlyFeasibleError(
        "the cone pencil has no strictly feasible point; restrict to the linear hull of the cone and re-encode "
        "it by a strictly feasible homogeneous pencil first");
  }
  const int d = cone.dim();
  SdpProblem p;
  p.blocks = {d};
  p.sense = SdpSense::Feasibility;
  std::vector<MatrixXd> F;
  for (int i = 0; i < cone.n(); ++i) {
    p.add_constraint(from_dense(0, cone.B[i]), a(i));
    F.push_back(cone.B[i]);
  }
  for (int j = 0; j < cone.m(); ++j) {
    p.add_constraint(from_dense(0, cone.C[j]), 0.0);
    F.push_back(cone.C[j]);
  }
  SdpSolution sol = solve_sdp(p, opt.sdp);
  DualMembership out;
  if (sol.status == SdpStatus::Optimal) {
    out.in_dual = true;
    out.B = sol.X[0];
    if (center) out.B = analytic_center(out.B, F);
    for (int i = 0; i < cone.n(); ++i) out.residual = std::max(out.residual, std::abs(inner(out.B, cone.B[i]) - a(i)));
    for (int j = 0; j < cone.m(); ++j) out.residual = std::max(out.residual, std::abs(inner(out.B, cone.C[j])));
    return out;
  }
  if (sol.status == SdpStatus::Infeasible) {
    // sum y_i F_i <= 0 with a'y_M = 1, so (-y_M, -y_N) is a cone point with a'xi = -1.
    out.xi = -sol.y.head(cone.n());
    out.eta = -sol.y.segment(cone.n(), cone.m());
    out.residual = std::max(0.0, -min_eig(pencil_eval(cone, out.xi, out.eta)));
    return out;
  }
  throw NumericalFailureError("dual_cone_member: solver returned " + to_string(sol.status) + " (" + sol.message + ")");
}

MatrixXd analytic_center(const MatrixXd& B0, const std::vector<MatrixXd>& F, int max_iter) {
  const int d = static_cast<int>(B0.rows());
  const double scale = 1.0 + B0.cwiseAbs().maxCoeff();
  if (min_eig(B0) <= 1e-10 * scale) return B0;
  // Basis of symmetric directions D with <F_k, D> = 0.
  const int nv = d * (d + 1) / 2;
  std::vector<MatrixXd> E;
  for (int c = 0; c < d; ++c)
    for (int r = 0; r <= c; ++r) {
      MatrixXd e = MatrixXd::Zero(d, d);
      e(r, c) = 1;
      e(c, r) = 1;
      E.push_back(e);
    }
  MatrixXd K(static_cast<Eigen::Index>(F.size()), nv);
  for (std::size_t k = 0; k < F.size(); ++k)
    for (int v = 0; v < nv; ++v) K(static_cast<Eigen::Index>(k), v) = inner(F[k], E[v]);
  MatrixXd N;
  if (F.empty()) {
    N = MatrixXd::Identity(nv, nv);
  } else {
    Eigen::FullPivLU<MatrixXd> lu(K);
    lu.setThreshold(1e-10);
    if (lu.rank() == nv) return B0;
    N = lu.kernel();
  }
  std::vector<MatrixXd> D;
  for (Eigen::Index l = 0; l < N.cols(); ++l) {
    MatrixXd m = MatrixXd::Zero(d, d);
    for (int v = 0; v < nv; ++v) m += N(v, l) * E[v];
    D.push_back(m);
  }
  MatrixXd B = B0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::LLT<MatrixXd> llt(B);
    MatrixXd Binv = llt.solve(MatrixXd::Identity(d, d));
    const auto L = static_cast<Eigen::Index>(D.size());
    std::vector<MatrixXd> W;
    for (const auto& dl : D) W.push_back(Binv * dl);
    VectorXd g(L);
    MatrixXd H(L, L);
    for (Eigen::Index l = 0; l < L; ++l) {
      g(l) = W[l].trace();
      for (Eigen::Index k = l; k < L; ++k) {
        H(l, k) = W[l].cwiseProduct(W[k].transpose()).sum();
        H(k, l) = H(l, k);
      }
    }
    VectorXd step = H.ldlt().solve(g);
    const double dec2 = g.dot(step);
    if (!std::isfinite(dec2) || dec2 < 1e-20) break;
    const double t = 1.0 / (1.0 + std::sqrt(dec2));
    MatrixXd delta = MatrixXd::Zero(d, d);
    for (Eigen::Index l = 0; l < L; ++l) delta += step(l) * D[l];
    B = symmetrize(B + t * delta);
    if (dec2 < 1e-16) break;
  }
  return B;
}

Shadow homogenize_shadow(const Shadow& s) {
  const Pencil& p = s.pencil();
  Pencil h;
  h.A = MatrixXd::Zero(p.dim(), p.dim());
  h.B.push_back(p.A);
  h.B.insert(h.B.end(), p.B.begin(), p.B.end());
  h.C = p.C;
  return Shadow(std::move(h));
}

Shadow linear_image(const Shadow& s, const MatrixXd& T) {
  const Pencil& p = s.pencil();
  if (T.cols() != p.n()) throw std::invalid_argument("linear_image: T has wrong number of columns");
  Eigen::JacobiSVD<MatrixXd> svd(T, Eigen::ComputeFullV);
  svd.setThreshold(1e-12);
  if (svd.rank() != T.rows()) {
    throw std::invalid_argument("linear_image: T must have full row rank (restrict the codomain to its range)");
  }
  const MatrixXd Tpinv = T.transpose() * (T * T.transpose()).inverse();
  const MatrixXd Nsp = svd.matrixV().rightCols(p.n() - T.rows());
  Pencil out;
  out.A = p.A;
  for (Eigen::Index r = 0; r < T.rows(); ++r) {
    MatrixXd m = MatrixXd::Zero(p.dim(), p.dim());
    for (int i = 0; i < p.n(); ++i) m += Tpinv(i, r) * p.B[i];
    out.B.push_back(m);
  }
  for (Eigen::Index l = 0; l < Nsp.cols(); ++l) {
    MatrixXd m = MatrixXd::Zero(p.dim(), p.dim());
    for (int i = 0; i < p.n(); ++i) m += Nsp(i, l) * p.B[i];
    out.C.push_back(m);
  }
  out.C.insert(out.C.end(), p.C.begin(), p.C.end());
  return Shadow(std::move(out));
}

Shadow intersect(const Shadow& a, const Shadow& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("intersect: ambient dimensions differ");
  const Pencil& p = a.pencil();
  const Pencil& q = b.pencil();
  const MatrixXd zp = MatrixXd::Zero(p.dim(), p.dim());
  const MatrixXd zq = MatrixXd::Zero(q.dim(), q.dim());
  Pencil out;
  out.A = direct_sum(p.A, q.A);
  for (int i = 0; i < p.n(); ++i) out.B.push_back(direct_sum(p.B[i], q.B[i]));
  for (const auto& c : p.C) out.C.push_back(direct_sum(c, zq));
  for (const auto& c : q.C) out.C.push_back(direct_sum(zp, c));
  return Shadow(std::move(out));
}

Shadow convex_hull_union(const Shadow& a, const Shadow& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("convex_hull_union: ambient dimensions differ");
  const Pencil& p = a.pencil();
  const Pencil& q = b.pencil();
  const int n = p.n();
  const int dp = p.dim(), dq = q.dim();
  auto embed = [&](const MatrixXd& mp, const MatrixXd& mq, double l0, double l1) {
    MatrixXd out = MatrixXd::Zero(dp + dq + 2, dp + dq + 2);
    out.topLeftCorner(dp, dp) = mp;
    out.block(dp, dp, dq, dq) = mq;
    out(dp + dq, dp + dq) = l0;
    out(dp + dq + 1, dp + dq + 1) = l1;
    return out;
  };
  const MatrixXd zp = MatrixXd::Zero(dp, dp), zq = MatrixXd::Zero(dq, dq);
  // x = x1 + x2 with (x1, lambda) in hom(K1), (x2, 1 - lambda) in hom(K2).
  Pencil out;
  out.A = embed(zp, q.A, 0.0, 1.0);
  for (int i = 0; i < n; ++i) out.B.push_back(embed(zp, q.B[i], 0.0, 0.0));
  for (int i = 0; i < n; ++i) out.C.push_back(embed(p.B[i], -q.B[i], 0.0, 0.0));  // x1
  out.C.push_back(embed(p.A, -q.A, 1.0, -1.0));                                  // lambda
  for (const auto& c : p.C) out.C.push_back(embed(c, zq, 0.0, 0.0));
  for (const auto& c : q.C) out.C.push_back(embed(zp, c, 0.0, 0.0));
  return Shadow(std::move(out));
}

}  // namespace shadowlab
