#include "shadowlab/gram.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <Eigen/Eigenvalues>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<int> GramSystem::block_sizes() const {
  std::vector<int> out;
  for (const auto& b : blocks) out.push_back(static_cast<int>(b.basis.size()));
  return out;
}

std::optional<RationalVector> GramSystem::coefficients(const RationalPolynomial& f) const {
  if (f.vars() != vars) throw std::invalid_argument("gram: polynomial variable list differs");
  RationalVector v = RationalVector::Constant(static_cast<Eigen::Index>(monomials.size()), Rational(0));
  for (const auto& [m, c] : f.terms()) {
    auto it = std::lower_bound(monomials.begin(), monomials.end(), m, GradedLexLess{});
    if (it == monomials.end() || !(*it == m)) return std::nullopt;
    v(it - monomials.begin()) = c;
  }
  return v;
}

std::vector<MatrixXd> GramSystem::moment_matrices(const VectorXd& lambda) const {
  std::vector<MatrixXd> out;
  for (int s : block_sizes()) out.push_back(MatrixXd::Zero(s, s));
  const MatrixXd Kd = to_double(K);
  const VectorXd vals = Kd.transpose() * lambda;
  for (std::size_t c = 0; c < coords.size(); ++c) {
    const auto& co = coords[c];
    const double v = co.i == co.j ? vals(static_cast<Eigen::Index>(c)) : 0.5 * vals(static_cast<Eigen::Index>(c));
    out[co.block](co.i, co.j) = v;
    out[co.block](co.j, co.i) = v;
  }
  return out;
}

std::vector<MatrixXd> GramSystem::to_blocks(const VectorXd& g) const {
  std::vector<MatrixXd> out;
  for (int s : block_sizes()) out.push_back(MatrixXd::Zero(s, s));
  for (std::size_t c = 0; c < coords.size(); ++c) {
    out[coords[c].block](coords[c].i, coords[c].j) = g(static_cast<Eigen::Index>(c));
    out[coords[c].block](coords[c].j, coords[c].i) = g(static_cast<Eigen::Index>(c));
  }
  return out;
}

std::vector<RationalMatrix> GramSystem::to_blocks(const RationalVector& g) const {
  std::vector<RationalMatrix> out;
  for (int s : block_sizes()) out.push_back(RationalMatrix::Constant(s, s, Rational(0)));
  for (std::size_t c = 0; c < coords.size(); ++c) {
    out[coords[c].block](coords[c].i, coords[c].j) = g(static_cast<Eigen::Index>(c));
    out[coords[c].block](coords[c].j, coords[c].i) = g(static_cast<Eigen::Index>(c));
  }
  return out;
}

VectorXd GramSystem::to_coords(const std::vector<MatrixXd>& G) const {
  VectorXd g(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t c = 0; c < coords.size(); ++c)
    g(static_cast<Eigen::Index>(c)) = 0.5 * (G[coords[c].block](coords[c].i, coords[c].j) +
                                             G[coords[c].block](coords[c].j, coords[c].i));
  return g;
}

GramSystem build_gram_system(const std::vector<std::string>& vars, std::vector<WeightedBlock> blocks) {
  GramSystem sys;
  sys.vars = vars;
  std::vector<std::map<Monomial, Rational, GradedLexLess>> columns;
  std::set<Monomial, GradedLexLess> all;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    if (blk.weight.vars() != vars) throw std::invalid_argument("gram: weight uses a different variable list");
    for (const auto& u : blk.basis)
      if (u.vars() != vars) throw std::invalid_argument("gram: basis element uses a different variable list");
    const int n = static_cast<int>(blk.basis.size());
    for (int j = 0; j < n; ++j) {
      const RationalPolynomial hu = blk.weight * blk.basis[j];
      for (int i = 0; i <= j; ++i) {
        const RationalPolynomial prod = hu * blk.basis[i];
        std::map<Monomial, Rational, GradedLexLess> col;
        for (const auto& [m, c] : prod.terms()) {
          col.emplace(m, i == j ? c : Rational(2 * c));
          all.insert(m);
        }
        sys.coords.push_back({static_cast<int>(b), i, j});
        columns.push_back(std::move(col));
      }
    }
  }
  sys.monomials.assign(all.begin(), all.end());
  sys.K = RationalMatrix::Constant(static_cast<Eigen::Index>(sys.monomials.size()),
                                   static_cast<Eigen::Index>(sys.coords.size()), Rational(0));
  std::map<Monomial, Eigen::Index, GradedLexLess> row;
  for (std::size_t r = 0; r < sys.monomials.size(); ++r) row.emplace(sys.monomials[r], static_cast<Eigen::Index>(r));
  for (std::size_t c = 0; c < columns.size(); ++c)
    for (const auto& [m, v] : columns[c]) sys.K(row.at(m), static_cast<Eigen::Index>(c)) = v;
  sys.blocks = std::move(blocks);
  return sys;
}

bool in_convex_hull(const std::vector<std::vector<Rational>>& points, const std::vector<Rational>& p) {
  if (points.empty()) return false;
  const std::size_t n = p.size();
  const std::size_t S = points.size();
  const std::size_t m = n + 1;
  const std::size_t cols = S + m + 1;  // lambda, artificials, rhs
  std::vector<std::vector<Rational>> T(m, std::vector<Rational>(cols, Rational(0)));
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t s = 0; s < S; ++s) T[r][s] = r < n ? points[s][r] : Rational(1);
    T[r][cols - 1] = r < n ? p[r] : Rational(1);
    if (T[r][cols - 1] < 0) {
      for (std::size_t s = 0; s < S; ++s) T[r][s] = -T[r][s];
      T[r][cols - 1] = -T[r][cols - 1];
    }
    T[r][S + r] = 1;
  }
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = S + r;
  // Phase I objective: minimize the sum of artificials.
  std::vector<Rational> cost(cols - 1, Rational(0));
  for (std::size_t r = 0; r < m; ++r) cost[S + r] = 1;
  while (true) {
    std::size_t enter = cols;
    for (std::size_t j = 0; j + 1 < cols; ++j) {
      Rational reduced = cost[j];
      for (std::size_t r = 0; r < m; ++r) reduced -= cost[basis[r]] * T[r][j];
      if (reduced < 0) {
        enter = j;
        break;
      }
    }
    if (enter == cols) break;
    std::size_t leave = m;
    Rational best;
    for (std::size_t r = 0; r < m; ++r) {
      if (T[r][enter] <= 0) continue;
      Rational ratio = T[r][cols - 1] / T[r][enter];
      if (leave == m || ratio < best || (ratio == best && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == m) break;  // unbounded direction cannot occur in phase I
    Rational piv = T[leave][enter];
    for (auto& v : T[leave]) v /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave || T[r][enter] == 0) continue;
      Rational f = T[r][enter];
      for (std::size_t j = 0; j < cols; ++j) T[r][j] -= f * T[leave][j];
    }
    basis[leave] = enter;
  }
  Rational infeas = 0;
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] >= S) infeas += T[r][cols - 1];
  return infeas == 0;
}

std::vector<Monomial> newton_basis(const RationalPolynomial& f) {
  if (f.is_zero()) return {};
  const std::size_t n = f.num_vars();
  std::vector<std::vector<Rational>> pts;
  std::set<Monomial, GradedLexLess> support;
  for (const auto& [m, c] : f.terms()) {
    support.insert(m);
    std::vector<Rational> v;
    for (int e : m.exponents()) v.emplace_back(e);
    pts.push_back(std::move(v));
  }
  std::vector<Monomial> basis;
  for (const auto& a : monomials_up_to(n, 0, std::max(0, f.degree() / 2))) {
    std::vector<Rational> twice;
    for (int e : a.exponents()) twice.emplace_back(2 * e);
    if (in_convex_hull(pts, twice)) basis.push_back(a);
  }
  // A square x^(2a) reachable only as a*a must carry a positive coefficient.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const Monomial sq = basis[k] * basis[k];
      if (support.count(sq) && f.coeff(sq) > 0) continue;
      bool other = false;
      for (std::size_t i = 0; i < basis.size() && !other; ++i)
        for (std::size_t j = i + 1; j < basis.size() && !other; ++j)
          if (basis[i] * basis[j] == sq) other = true;
      if (!other) {
        basis.erase(basis.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  return basis;
}

namespace {

// Symmetric matrix of the coefficient functional of row r restricted to block b.
RationalMatrix block_row_matrix(const GramSystem& sys, Eigen::Index r, int b) {
  const int n = static_cast<int>(sys.blocks[b].basis.size());
  RationalMatrix A = RationalMatrix::Constant(n, n, Rational(0));
  for (std::size_t c = 0; c < sys.coords.size(); ++c) {
    const auto& co = sys.coords[c];
    if (co.block != b) continue;
    const Rational& v = sys.K(r, static_cast<Eigen::Index>(c));
    if (v == 0) continue;
    if (co.i == co.j) {
      A(co.i, co.i) = v;
    } else {
      A(co.i, co.j) = v / 2;
      A(co.j, co.i) = v / 2;
    }
  }
  return A;
}

// G_b = Q_b H_b Q_b'. Round H, project onto the affine constraints, check PSD.
std::optional<ExactGram> attempt(const GramSystem& sys, const RationalVector& f, const std::vector<RationalMatrix>& Q,
                                 const std::vector<MatrixXd>& H, std::int64_t bound) {
  const int nb = static_cast<int>(sys.blocks.size());
  std::vector<Eigen::Index> offset{0};
  for (int b = 0; b < nb; ++b) {
    const Eigen::Index r = Q[b].cols();
    offset.push_back(offset.back() + r * (r + 1) / 2);
  }
  const Eigen::Index nh = offset.back();
  const Eigen::Index m = static_cast<Eigen::Index>(sys.monomials.size());
  RationalMatrix R = RationalMatrix::Constant(m, nh + 1, Rational(0));
  for (Eigen::Index row = 0; row < m; ++row) {
    for (int b = 0; b < nb; ++b) {
      if (Q[b].cols() == 0) continue;
      RationalMatrix A = block_row_matrix(sys, row, b);
      RationalMatrix QAQ = Q[b].transpose() * A * Q[b];
      Eigen::Index idx = offset[b];
      for (Eigen::Index q = 0; q < Q[b].cols(); ++q)
        for (Eigen::Index p = 0; p <= q; ++p) R(row, idx++) = p == q ? QAQ(p, p) : Rational(2 * QAQ(p, q));
    }
    R(row, nh) = f(row);
  }
  RowEchelon e = row_reduce(R);
  for (int p : e.pivots)
    if (p == nh) return std::nullopt;  // face cannot carry f
  RationalMatrix Ri = e.reduced.leftCols(nh);
  RationalVector fi = e.reduced.col(nh);

  RationalVector h(nh);
  for (int b = 0; b < nb; ++b) {
    Eigen::Index idx = offset[b];
    for (Eigen::Index q = 0; q < Q[b].cols(); ++q)
      for (Eigen::Index p = 0; p <= q; ++p) h(idx++) = approximate_rational(H[b](p, q), bound);
  }
  if (Ri.rows() > 0) {
    RationalVector resid = Ri * h - fi;
    RationalMatrix gram = Ri * Ri.transpose();
    auto corr = solve(gram, resid);
    if (!corr) return std::nullopt;
    h -= Ri.transpose() * *corr;
  }
  ExactGram out;
  out.denominator_bound = bound;
  for (int b = 0; b < nb; ++b) {
    const Eigen::Index r = Q[b].cols();
    RationalMatrix Hb = RationalMatrix::Constant(r, r, Rational(0));
    Eigen::Index idx = offset[b];
    for (Eigen::Index q = 0; q < r; ++q)
      for (Eigen::Index p = 0; p <= q; ++p) {
        Hb(p, q) = h(idx);
        Hb(q, p) = h(idx);
        ++idx;
      }
    auto fac = factor_psd(Hb);
    if (!fac) return std::nullopt;
    out.gram.push_back(Q[b] * Hb * Q[b].transpose());
    for (std::size_t k = 0; k < fac->weights.size(); ++k)
      out.squares.push_back({b, fac->weights[k], Q[b] * fac->vectors[k]});
  }
  return out;
}

// Rational basis of the numerical kernel of a PSD block, via RREF + rounding.
std::optional<RationalMatrix> rational_kernel(const MatrixXd& G) {
  const Eigen::Index n = G.rows();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(G);
  const VectorXd ev = es.eigenvalues();
  const double top = std::max(1.0, ev.cwiseAbs().maxCoeff());
  // Kernel size: the widest spectral gap below a small fraction of the top.
  Eigen::Index k = 0;
  double best_ratio = 1e3;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    if (ev(i) > 1e-4 * top) break;
    double ratio = ev(i + 1) / std::max(std::abs(ev(i)), 1e-300);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      k = i + 1;
    }
  }
  if (k == 0) return std::nullopt;
  MatrixXd V = es.eigenvectors().leftCols(k).transpose();  // k x n, rows span the kernel
  // Gauss-Jordan with full pivoting; entries below the noise level are snapped
  // to zero so that the rounded basis is sparse.
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (Eigen::Index row = 0; row < k; ++row) {
    Eigen::Index pr = row, pc = -1;
    double mx = 0.0;
    for (Eigen::Index r = row; r < k; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        if (!used[static_cast<std::size_t>(c)] && std::abs(V(r, c)) > mx) {
          mx = std::abs(V(r, c));
          pr = r;
          pc = c;
        }
    if (pc < 0 || mx < 1e-3) return std::nullopt;
    V.row(pr).swap(V.row(row));
    V.row(row) /= V(row, pc);
    for (Eigen::Index r = 0; r < k; ++r)
      if (r != row) V.row(r) -= V(r, pc) * V.row(row);
    used[static_cast<std::size_t>(pc)] = true;
  }
  V = V.unaryExpr([](double x) { return std::abs(x) < 1e-6 ? 0.0 : x; });
  RationalMatrix Kr(n, k);
  for (Eigen::Index r = 0; r < k; ++r)
    for (Eigen::Index c = 0; c < n; ++c) Kr(c, r) = approximate_rational(V(r, c), 1000);
  const MatrixXd Kd = to_double(Kr);
  if ((G * Kd).cwiseAbs().maxCoeff() > 1e-4 * top) return std::nullopt;
  return Kr;
}

}  // namespace

std::optional<ExactGram> rationalize_gram(const GramSystem& sys, const RationalVector& f, const std::vector<MatrixXd>& G,
                                          const std::vector<std::int64_t>& denominator_bounds) {
  const int nb = static_cast<int>(sys.blocks.size());
  std::vector<RationalMatrix> I;
  for (int b = 0; b < nb; ++b) {
    const Eigen::Index n = static_cast<Eigen::Index>(sys.blocks[b].basis.size());
    RationalMatrix id = RationalMatrix::Constant(n, n, Rational(0));
    for (Eigen::Index i = 0; i < n; ++i) id(i, i) = 1;
    I.push_back(id);
  }
  for (auto bound : denominator_bounds)
    if (auto r = attempt(sys, f, I, G, bound)) return r;

  // Face reduction: restrict each block to the complement of its numerical kernel.
  std::vector<RationalMatrix> Q;
  std::vector<MatrixXd> H;
  bool any = false;
  for (int b = 0; b < nb; ++b) {
    auto ker = G[b].rows() ? rational_kernel(G[b]) : std::nullopt;
    if (!ker) {
      Q.push_back(I[b]);
      H.push_back(G[b]);
      continue;
    }
    any = true;
    RationalMatrix comp = nullspace(RationalMatrix(ker->transpose()));
    const MatrixXd Qd = to_double(comp);
    const MatrixXd QtQinv = (Qd.transpose() * Qd).inverse();
    H.push_back(QtQinv * Qd.transpose() * G[b] * Qd * QtQinv);
    Q.push_back(std::move(comp));
  }
  if (!any) return std::nullopt;
  for (auto bound : denominator_bounds) {
    if (auto r = attempt(sys, f, Q, H, bound)) {
      r->used_kernel = true;
      return r;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<WeightedBlock>> reduce_face(const GramSystem& sys, const std::vector<MatrixXd>& G) {
  std::vector<WeightedBlock> out;
  bool any = false;
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
    const auto& blk = sys.blocks[b];
    auto ker = G[b].rows() ? rational_kernel(G[b]) : std::nullopt;
    if (!ker) {
      out.push_back(blk);
      continue;
    }
    any = true;
    const RationalMatrix comp = nullspace(RationalMatrix(ker->transpose()));
    WeightedBlock nb{blk.weight, {}};
    for (Eigen::Index j = 0; j < comp.cols(); ++j) {
      RationalPolynomial q(sys.vars);
      for (Eigen::Index i = 0; i < comp.rows(); ++i)
        if (comp(i, j) != 0) q += blk.basis[static_cast<std::size_t>(i)] * comp(i, j);
      nb.basis.push_back(std::move(q));
    }
    out.push_back(std::move(nb));
  }
  if (!any) return std::nullopt;
  return out;
}

RationalPolynomial certificate_residual(const GramSystem& sys, const ExactGram& cert, const RationalPolynomial& f) {
  RationalPolynomial total(sys.vars);
  for (const auto& sq : cert.squares) {
    const auto& blk = sys.blocks[sq.block];
    RationalPolynomial q(sys.vars);
    for (Eigen::Index i = 0; i < sq.vector.size(); ++i)
      if (sq.vector(i) != 0) q += blk.basis[i] * sq.vector(i);
    total += blk.weight * q * q * sq.weight;
  }
  return total - f;
}

}  // namespace shadowlab
