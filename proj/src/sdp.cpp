#include "shadowlab/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double min_eig(const MatrixXd& a) {
  if (a.rows() == 0) return std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

MatrixXd psd_sqrt(const MatrixXd& a, double tol_psd) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrize(a));
  VectorXd ev = es.eigenvalues();
  if (ev.size() && ev(0) < -tol_psd) throw std::domain_error("psd_sqrt: matrix is not positive semidefinite");
  ev = ev.cwiseMax(0.0).cwiseSqrt();
  return symmetrize(es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose());
}

MatrixXd symmetrize(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }

void append_dense(SparseSym& out, int block, const MatrixXd& m, double drop) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i <= j; ++i) {
      double v = 0.5 * (m(i, j) + m(j, i));
      if (std::abs(v) > drop) out.push_back({block, static_cast<int>(i), static_cast<int>(j), v});
    }
}

SparseSym from_dense(int block, const MatrixXd& m) {
  SparseSym out;
  append_dense(out, block, m);
  return out;
}

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::Unbounded: return "Unbounded";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

void SdpProblem::add_constraint(SparseSym a, double rhs) {
  A.push_back(std::move(a));
  b.conservativeResize(b.size() + 1);
  b(b.size() - 1) = rhs;
}

void SdpProblem::check() const {
  if (blocks.empty()) throw std::invalid_argument("sdp: no blocks");
  for (int s : blocks)
    if (s < 1) throw std::invalid_argument("sdp: block sizes must be positive");
  if (static_cast<Eigen::Index>(A.size()) != b.size()) throw std::invalid_argument("sdp: constraint count != rhs size");
  auto check_entries = [&](const SparseSym& m) {
    for (const auto& e : m) {
      if (e.block < 0 || e.block >= static_cast<int>(blocks.size()) || e.row < 0 || e.col < e.row ||
          e.col >= blocks[e.block])
        throw std::invalid_argument("sdp: matrix entry outside its block");
    }
  };
  check_entries(C);
  for (const auto& a : A) check_entries(a);
}

BlockMatrix to_blocks(const SparseSym& m, const std::vector<int>& blocks) {
  BlockMatrix out;
  for (int s : blocks) out.push_back(MatrixXd::Zero(s, s));
  for (const auto& e : m) {
    out[e.block](e.row, e.col) += e.value;
    if (e.row != e.col) out[e.block](e.col, e.row) += e.value;
  }
  return out;
}

// tr(A P) for symmetric A and arbitrary square blocks P.
double inner(const SparseSym& a, const BlockMatrix& p) {
  double s = 0.0;
  for (const auto& e : a) {
    const auto& m = p[e.block];
    s += e.row == e.col ? e.value * m(e.row, e.row) : e.value * (m(e.row, e.col) + m(e.col, e.row));
  }
  return s;
}

MatrixXd block_diag(const BlockMatrix& x) {
  Eigen::Index n = 0;
  for (const auto& b : x) n += b.rows();
  MatrixXd out = MatrixXd::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : x) {
    out.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return out;
}

namespace {

double block_inner(const BlockMatrix& a, const BlockMatrix& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double block_norm(const BlockMatrix& a) { return std::sqrt(block_inner(a, a)); }

BlockMatrix axpy(const BlockMatrix& x, double alpha, const BlockMatrix& d) {
  BlockMatrix out = x;
  for (std::size_t k = 0; k < x.size(); ++k) out[k] += alpha * d[k];
  return out;
}

// Largest step alpha with X + alpha dX >= 0 (infinity when unconstrained).
double max_step(const BlockMatrix& x, const BlockMatrix& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    double lmin;
    if (x[k].rows() == 1) {
      lmin = dx[k](0, 0) / x[k](0, 0);
    } else {
      Eigen::LLT<MatrixXd> llt(x[k]);
      MatrixXd l = llt.matrixL();
      MatrixXd t = l.triangularView<Eigen::Lower>().solve(dx[k]);
      t = l.triangularView<Eigen::Lower>().solve(t.transpose()).transpose();
      lmin = min_eig(symmetrize(t));
    }
    if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
  }
  return alpha;
}

struct Direction {
  BlockMatrix dX, dS;
  VectorXd dy;
  double dtau = 0, dkappa = 0;
};

// Working data after preprocessing (rank filter and scaling).
struct Scaled {
  std::vector<int> blocks;
  std::vector<SparseSym> A;        // upper entries
  std::vector<SparseSym> A_full;   // both triangles, for the Schur complement
  VectorXd b;
  SparseSym C;
  BlockMatrix Cd;
  VectorXd row_scale;              // original A_i = row_scale_i * scaled A_i
  double c_scale = 1.0;
  std::vector<int> kept;           // original indices of kept constraints
};

SparseSym full_entries(const SparseSym& m) {
  SparseSym out;
  for (const auto& e : m) {
    out.push_back(e);
    if (e.row != e.col) out.push_back({e.block, e.col, e.row, e.value});
  }
  return out;
}

VectorXd apply_A(const Scaled& s, const BlockMatrix& x) {
  VectorXd out(static_cast<Eigen::Index>(s.A.size()));
  for (std::size_t i = 0; i < s.A.size(); ++i) out(static_cast<Eigen::Index>(i)) = inner(s.A[i], x);
  return out;
}

BlockMatrix apply_At(const Scaled& s, const VectorXd& y) {
  BlockMatrix out;
  for (int b : s.blocks) out.push_back(MatrixXd::Zero(b, b));
  for (std::size_t i = 0; i < s.A.size(); ++i) {
    double yi = y(static_cast<Eigen::Index>(i));
    if (yi == 0) continue;
    for (const auto& e : s.A_full[i]) out[e.block](e.row, e.col) += yi * e.value;
  }
  return out;
}

// Vectorized (isometric) view of the constraints, used for the rank filter.
MatrixXd constraint_rows(const std::vector<int>& blocks, const std::vector<SparseSym>& a) {
  std::vector<Eigen::Index> offset{0};
  for (int s : blocks) offset.push_back(offset.back() + s * (s + 1) / 2);
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(a.size()), offset.back());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const auto& e : a[i]) {
      Eigen::Index idx = offset[e.block] + e.col * (e.col + 1) / 2 + e.row;
      out(static_cast<Eigen::Index>(i), idx) += e.row == e.col ? e.value : std::sqrt(2.0) * e.value;
    }
  }
  return out;
}

}  // namespace

SdpSolution solve_sdp(const SdpProblem& p, const SdpOptions& opt) {
  p.check();
  SdpSolution sol;
  const int nblocks = static_cast<int>(p.blocks.size());
  const int N = [&] {
    int n = 0;
    for (int s : p.blocks) n += s;
    return n;
  }();
  const SparseSym c_orig = p.sense == SdpSense::Feasibility ? SparseSym{} : p.C;

  // Rank filter: keep a maximal independent subset of constraints; a dropped
  // constraint inconsistent with the kept ones proves infeasibility.
  Scaled s;
  s.blocks = p.blocks;
  const int m_orig = p.num_constraints();
  if (m_orig > 0) {
    MatrixXd rows = constraint_rows(p.blocks, p.A);
    VectorXd norms = rows.rowwise().norm();
    MatrixXd normalized = rows;
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      if (norms(i) > 0) normalized.row(i) /= norms(i);
    Eigen::ColPivHouseholderQR<MatrixXd> qr(normalized.transpose());
    qr.setThreshold(1e-10);
    const Eigen::Index r = qr.rank();
    std::vector<int> kept;
    for (Eigen::Index k = 0; k < r; ++k) kept.push_back(static_cast<int>(qr.colsPermutation().indices()(k)));
    std::sort(kept.begin(), kept.end());
    std::vector<bool> is_kept(m_orig, false);
    for (int k : kept) is_kept[k] = true;
    if (r < m_orig) {
      MatrixXd basis(rows.cols(), r);
      VectorXd bk(r);
      for (Eigen::Index k = 0; k < r; ++k) {
        basis.col(k) = rows.row(kept[k]).transpose();
        bk(k) = p.b(kept[k]);
      }
      Eigen::ColPivHouseholderQR<MatrixXd> bqr(basis);
      for (int i = 0; i < m_orig; ++i) {
        if (is_kept[i]) continue;
        VectorXd coef = r > 0 ? VectorXd(bqr.solve(rows.row(i).transpose())) : VectorXd();
        double implied = r > 0 ? coef.dot(bk) : 0.0;
        double mismatch = p.b(i) - implied;
        if (std::abs(mismatch) > 1e-9 * (1.0 + std::abs(p.b(i)) + std::abs(implied))) {
          // y = e_i - sum coef_k e_k has A^T y = 0 and b'y = mismatch.
          VectorXd y = VectorXd::Zero(m_orig);
          y(i) = 1.0;
          for (Eigen::Index k = 0; k < r; ++k) y(kept[k]) -= coef(k);
          y /= mismatch;
          sol.status = SdpStatus::Infeasible;
          sol.y = y;
          BlockMatrix aty;
          for (int b : p.blocks) aty.push_back(MatrixXd::Zero(b, b));
          for (int j = 0; j < m_orig; ++j)
            for (const auto& e : full_entries(p.A[j])) aty[e.block](e.row, e.col) += y(j) * e.value;
          double lmax = -std::numeric_limits<double>::infinity();
          for (const auto& blk : aty) lmax = std::max(lmax, -min_eig(-blk));
          sol.certificate_residual = lmax;
          sol.message = "constraint " + std::to_string(i) + " is inconsistent with the others";
          return sol;
        }
      }
    }
    s.kept = kept;
    s.row_scale.resize(r);
    s.b.resize(r);
    for (Eigen::Index k = 0; k < r; ++k) {
      const int i = kept[k];
      double scale = norms(i);
      s.row_scale(k) = scale;
      SparseSym a = p.A[i];
      for (auto& e : a) e.value /= scale;
      s.A.push_back(a);
      s.A_full.push_back(full_entries(a));
      s.b(k) = p.b(i) / scale;
    }
  }
  {
    double cn = 0.0;
    for (const auto& e : c_orig) cn += (e.row == e.col ? 1.0 : 2.0) * e.value * e.value;
    cn = std::sqrt(cn);
    s.c_scale = cn > 0 ? cn : 1.0;
    s.C = c_orig;
    for (auto& e : s.C) e.value /= s.c_scale;
    s.Cd = to_blocks(s.C, s.blocks);
  }
  const Eigen::Index m = static_cast<Eigen::Index>(s.A.size());
  const double c_norm = block_norm(s.Cd);

  BlockMatrix X, S;
  for (int b : s.blocks) {
    X.push_back(MatrixXd::Identity(b, b));
    S.push_back(MatrixXd::Identity(b, b));
  }
  VectorXd y = VectorXd::Zero(m);
  double tau = 1.0, kappa = 1.0;

  // Reports the current iterate mapped back to the caller's scaling.
  auto unscale = [&](double t) {
    sol.X.clear();
    sol.S.clear();
    for (int k = 0; k < nblocks; ++k) {
      sol.X.push_back(symmetrize(X[k] / t));
      sol.S.push_back(symmetrize(S[k] * (s.c_scale / t)));
    }
    sol.y = VectorXd::Zero(m_orig);
    for (Eigen::Index k = 0; k < m; ++k) sol.y(s.kept[k]) = y(k) / t * s.c_scale / s.row_scale(k);
    sol.primal_objective = inner(c_orig, sol.X);
    sol.dual_objective = p.b.size() ? p.b.dot(sol.y) : 0.0;
  };

  int small_steps = 0;
  for (int iter = 0;; ++iter) {
    sol.iterations = iter;
    const VectorXd ax = apply_A(s, X);
    const BlockMatrix aty = apply_At(s, y);
    const VectorXd rp = s.b * tau - ax;
    BlockMatrix rd;
    for (int k = 0; k < nblocks; ++k) rd.push_back(s.Cd[k] * tau - aty[k] - S[k]);
    const double pobj = block_inner(s.Cd, X);
    const double dobj = m ? s.b.dot(y) : 0.0;
    const double rg = dobj - pobj - kappa;
    const double mu = (block_inner(X, S) + tau * kappa) / (N + 1);

    // Convergence in the caller's scaling (absolute primal residual).
    {
      double pinf = 0.0;
      for (Eigen::Index k = 0; k < m; ++k)
        pinf = std::max(pinf, std::abs(ax(k) / tau - s.b(k)) * s.row_scale(k));
      const double dinf = block_norm(rd) / tau / (1.0 + c_norm);
      const double po = pobj / tau * s.c_scale, dob = dobj / tau * s.c_scale;
      const double gap = std::abs(po - dob) / (1.0 + std::abs(po) + std::abs(dob));
      sol.primal_infeasibility = pinf;
      sol.dual_infeasibility = dinf;
      sol.gap = gap;
      if (pinf <= opt.tol_feas && dinf <= opt.tol_feas && gap <= opt.tol_gap) {
        unscale(tau);
        sol.status = SdpStatus::Optimal;
        return sol;
      }
    }
    if (tau <= opt.infeasibility_ratio * kappa) {
      // Farkas rays.
      if (dobj > 0) {
        VectorXd yr = y / dobj;
        BlockMatrix ay = apply_At(s, yr);
        double lmax = -std::numeric_limits<double>::infinity();
        for (const auto& blk : ay) lmax = std::max(lmax, -min_eig(-symmetrize(blk)));
        if (lmax <= opt.tol_feas) {
          sol.status = SdpStatus::Infeasible;
          sol.y = VectorXd::Zero(m_orig);
          for (Eigen::Index k = 0; k < m; ++k) sol.y(s.kept[k]) = yr(k) / s.row_scale(k);
          sol.certificate_residual = lmax;
          sol.X = X;
          sol.S = S;
          sol.message = "primal infeasible: Farkas ray verified";
          return sol;
        }
      }
      if (pobj < 0) {
        BlockMatrix xr;
        for (const auto& blk : X) xr.push_back(blk / (-pobj * s.c_scale));
        VectorXd axr = apply_A(s, xr).cwiseProduct(s.row_scale);
        double res = axr.size() ? axr.lpNorm<Eigen::Infinity>() : 0.0;
        if (res <= opt.tol_feas) {
          sol.status = SdpStatus::Unbounded;
          sol.X = xr;
          sol.certificate_residual = res;
          sol.y = VectorXd::Zero(m_orig);
          sol.message = "dual infeasible: improving primal ray verified";
          return sol;
        }
      }
      unscale(tau);
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "tau/kappa below threshold without a verifiable certificate";
      return sol;
    }
    if (iter >= opt.max_iter) {
      unscale(tau);
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "iteration limit reached";
      return sol;
    }

    // Schur complement M_ij = tr(A_i X A_j S^-1), plus the tau-column terms.
    BlockMatrix Sinv;
    for (int k = 0; k < nblocks; ++k) {
      Eigen::LLT<MatrixXd> llt(S[k]);
      if (llt.info() != Eigen::Success) {
        unscale(tau);
        sol.status = SdpStatus::NumericalFailure;
        sol.message = "dual slack lost definiteness";
        return sol;
      }
      Sinv.push_back(symmetrize(llt.solve(MatrixXd::Identity(s.blocks[k], s.blocks[k]))));
    }
    MatrixXd M(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      // G = S^-1 A_i X restricted to the touched blocks.
      std::vector<MatrixXd> G(nblocks);
      std::vector<int> nnz(nblocks, 0);
      for (const auto& e : s.A_full[i]) ++nnz[e.block];
      for (int k = 0; k < nblocks; ++k) {
        if (!nnz[k]) continue;
        const int d = s.blocks[k];
        if (static_cast<long>(nnz[k]) * 4 >= static_cast<long>(d) * d) {
          MatrixXd ai = MatrixXd::Zero(d, d);
          for (const auto& e : s.A_full[i])
            if (e.block == k) ai(e.row, e.col) += e.value;
          G[k] = Sinv[k] * ai * X[k];
        } else {
          G[k] = MatrixXd::Zero(d, d);
          for (const auto& e : s.A_full[i])
            if (e.block == k) G[k].noalias() += e.value * Sinv[k].col(e.row) * X[k].row(e.col);
        }
      }
      for (Eigen::Index j = i; j < m; ++j) {
        double v = 0.0;
        for (const auto& e : s.A_full[j])
          if (nnz[e.block]) v += e.value * G[e.block](e.col, e.row);
        M(i, j) = v;
        M(j, i) = v;
      }
    }
    BlockMatrix XCSi;
    for (int k = 0; k < nblocks; ++k) XCSi.push_back(X[k] * s.Cd[k] * Sinv[k]);
    const VectorXd u = apply_A(s, XCSi);
    const double c_xcs = block_inner(s.Cd, [&] {
      BlockMatrix t;
      for (const auto& blk : XCSi) t.push_back(blk.transpose());
      return t;
    }());
    Eigen::LDLT<MatrixXd> schur(M);
    if (m > 0 && schur.info() != Eigen::Success) {
      unscale(tau);
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "Schur complement factorization failed";
      return sol;
    }
    const VectorXd q = m ? VectorXd(schur.solve(u + s.b)) : VectorXd();
    BlockMatrix XrdSi;
    for (int k = 0; k < nblocks; ++k) XrdSi.push_back(X[k] * rd[k] * Sinv[k]);
    const VectorXd a_xrds = apply_A(s, XrdSi);
    double c_xrds = 0.0;
    for (int k = 0; k < nblocks; ++k) c_xrds += s.Cd[k].cwiseProduct(XrdSi[k].transpose()).sum();

    auto direction = [&](double eta, double sigma_mu, const BlockMatrix* corr, double corr_tk) {
      Direction d;
      BlockMatrix Rc;
      for (int k = 0; k < nblocks; ++k) {
        MatrixXd r = sigma_mu * Sinv[k] - X[k];
        if (corr) r -= symmetrize((*corr)[k] * Sinv[k]);
        Rc.push_back(r);
      }
      const VectorXd h1 = m ? VectorXd(eta * rp - apply_A(s, Rc) + eta * a_xrds) : VectorXd();
      const double w = (sigma_mu - tau * kappa - corr_tk) / tau;
      const double h2 = eta * rg - block_inner(s.Cd, Rc) + eta * c_xrds - w;
      const VectorXd pv = m ? VectorXd(schur.solve(h1)) : VectorXd();
      const VectorXd umb = u - s.b;
      const double denom = (m ? umb.dot(q) : 0.0) - c_xcs - kappa / tau;
      d.dtau = (h2 - (m ? umb.dot(pv) : 0.0)) / denom;
      d.dy = m ? VectorXd(pv + q * d.dtau) : VectorXd();
      const BlockMatrix atdy = apply_At(s, d.dy);
      for (int k = 0; k < nblocks; ++k) {
        MatrixXd dS = eta * rd[k] - atdy[k] + s.Cd[k] * d.dtau;
        d.dS.push_back(symmetrize(dS));
        d.dX.push_back(symmetrize(Rc[k] - X[k] * d.dS[k] * Sinv[k]));
      }
      d.dkappa = w - kappa / tau * d.dtau;
      return d;
    };
    auto step_limit = [&](const Direction& d) {
      double a = std::min(max_step(X, d.dX), max_step(S, d.dS));
      if (d.dtau < 0) a = std::min(a, -tau / d.dtau);
      if (d.dkappa < 0) a = std::min(a, -kappa / d.dkappa);
      return a;
    };

    const Direction pred = direction(1.0, 0.0, nullptr, 0.0);
    const double a_aff = std::min(1.0, step_limit(pred));
    const double mu_aff =
        (block_inner(axpy(X, a_aff, pred.dX), axpy(S, a_aff, pred.dS)) +
         (tau + a_aff * pred.dtau) * (kappa + a_aff * pred.dkappa)) /
        (N + 1);
    double sigma = std::pow(std::max(0.0, mu_aff) / mu, 3);
    sigma = std::clamp(sigma, 0.0, 1.0);
    BlockMatrix corr;
    for (int k = 0; k < nblocks; ++k) corr.push_back(pred.dX[k] * pred.dS[k]);
    const Direction d = direction(1.0 - sigma, sigma * mu, &corr, pred.dtau * pred.dkappa);
    const double alpha = std::min(1.0, 0.95 * step_limit(d));

    X = axpy(X, alpha, d.dX);
    S = axpy(S, alpha, d.dS);
    if (m) y += alpha * d.dy;
    tau += alpha * d.dtau;
    kappa += alpha * d.dkappa;
    small_steps = alpha < 1e-8 ? small_steps + 1 : 0;
    if (small_steps >= 3 || !std::isfinite(tau) || !std::isfinite(kappa)) {
      unscale(tau);
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "stalled";
      return sol;
    }
  }
}

}  // namespace shadowlab
