#include "shadowlab/subspace.hpp"

#include <set>

namespace shadowlab {

namespace {

std::vector<Monomial> collect_support(const std::vector<RationalPolynomial>& polys) {
  std::set<Monomial, GradedLexLess> all;
  for (const auto& p : polys)
    for (const auto& [m, c] : p.terms()) all.insert(m);
  return {all.begin(), all.end()};
}

std::vector<int> binomials(int n) {
  std::vector<int> row{1};
  for (int i = 0; i < n; ++i) {
    std::vector<int> next(row.size() + 1, 1);
    for (std::size_t k = 1; k < row.size(); ++k) next[k] = row[k - 1] + row[k];
    row = std::move(next);
  }
  return row;
}

}  // namespace

Subspace::Subspace(std::vector<std::string> vars, std::vector<RationalPolynomial> basis)
    : vars_(std::move(vars)), basis_(std::move(basis)) {
  for (const auto& b : basis_) {
    if (b.vars() != vars_) throw std::invalid_argument("subspace basis element uses a different variable list");
    if (b.is_zero()) throw std::invalid_argument("subspace basis contains the zero polynomial");
  }
  support_ = collect_support(basis_);
  for (std::size_t i = 0; i < support_.size(); ++i) support_index_.emplace(support_[i], static_cast<int>(i));

  const auto k = static_cast<Eigen::Index>(basis_.size());
  const auto s = static_cast<Eigen::Index>(support_.size());
  RationalMatrix aug = RationalMatrix::Constant(k, s + k, Rational(0));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (const auto& [m, c] : basis_[i].terms()) aug(i, support_index_.at(m)) = c;
    aug(i, s + i) = 1;
  }
  RowEchelon e = row_reduce(aug);
  for (int p : e.pivots) {
    if (p >= s) throw std::invalid_argument("subspace basis is linearly dependent");
  }
  pivots_ = e.pivots;
  rref_ = e.reduced.leftCols(s);
  transform_ = e.reduced.rightCols(k);
  contains_one_ = contains(RationalPolynomial::constant(vars_, Rational(1)));
}

Subspace Subspace::span(std::vector<std::string> vars, const std::vector<RationalPolynomial>& generators) {
  std::vector<RationalPolynomial> nonzero;
  for (const auto& g : generators) {
    if (g.vars() != vars) throw std::invalid_argument("spanning family uses a different variable list");
    if (!g.is_zero()) nonzero.push_back(g);
  }
  std::vector<Monomial> sup = collect_support(nonzero);
  RowEchelon e = row_reduce(coefficient_matrix(nonzero, sup).transpose());
  std::vector<RationalPolynomial> basis;
  for (Eigen::Index r = 0; r < e.reduced.rows(); ++r) {
    RationalPolynomial b(vars);
    for (Eigen::Index c = 0; c < e.reduced.cols(); ++c) b.add_term(sup[c], e.reduced(r, c));
    basis.push_back(std::move(b));
  }
  return Subspace(std::move(vars), std::move(basis));
}

Subspace Subspace::from_monomials(std::vector<std::string> vars, const std::vector<Monomial>& monomials) {
  std::vector<RationalPolynomial> basis;
  for (const auto& m : monomials) basis.push_back(RationalPolynomial::monomial(vars, m, Rational(1)));
  return Subspace(std::move(vars), std::move(basis));
}

std::optional<RationalVector> Subspace::coordinates(const RationalPolynomial& f) const {
  if (f.vars() != vars_) throw std::invalid_argument("polynomial variable list differs from subspace");
  const auto s = static_cast<Eigen::Index>(support_.size());
  RationalVector v = RationalVector::Constant(s, Rational(0));
  for (const auto& [m, c] : f.terms()) {
    auto it = support_index_.find(m);
    if (it == support_index_.end()) return std::nullopt;
    v(it->second) = c;
  }
  // Eliminate against the reduced rows; coefficient of pivot row r is v(pivot).
  RationalVector rcoef(static_cast<Eigen::Index>(pivots_.size()));
  for (std::size_t r = 0; r < pivots_.size(); ++r) {
    Rational a = v(pivots_[r]);
    rcoef(static_cast<Eigen::Index>(r)) = a;
    if (a == 0) continue;
    for (Eigen::Index c = 0; c < s; ++c)
      if (rref_(static_cast<Eigen::Index>(r), c) != 0) v(c) -= a * rref_(static_cast<Eigen::Index>(r), c);
  }
  for (Eigen::Index c = 0; c < s; ++c)
    if (v(c) != 0) return std::nullopt;
  RationalVector out = transform_.transpose() * rcoef;
  return out;
}

bool Subspace::contains(const PuiseuxPolynomial& f) const {
  for (const auto& [order, slice] : split_by_order(f)) {
    if (order < 0) return false;
    if (!contains(slice)) return false;
  }
  return true;
}

Subspace Subspace::with_one() const {
  if (contains_one_) return *this;
  std::vector<RationalPolynomial> b{RationalPolynomial::constant(vars_, Rational(1))};
  b.insert(b.end(), basis_.begin(), basis_.end());
  return Subspace(vars_, std::move(b));
}

bool Subspace::is_monomial() const {
  for (const auto& b : basis_)
    if (b.num_terms() != 1) return false;
  return true;
}

std::vector<std::string> default_vars(int n, const std::string& stem) {
  std::vector<std::string> out;
  for (int i = 1; i <= n; ++i) out.push_back(stem + std::to_string(i));
  return out;
}

Subspace monomial_subspace(int n, int d_max, bool include_constant, std::vector<std::string> vars) {
  if (n < 1 || d_max < 1) throw std::invalid_argument("monomial_subspace needs n >= 1 and d_max >= 1");
  if (vars.empty()) vars = default_vars(n);
  if (static_cast<int>(vars.size()) != n) throw std::invalid_argument("variable list has wrong length");
  return Subspace::from_monomials(std::move(vars),
                                  monomials_up_to(static_cast<std::size_t>(n), include_constant ? 0 : 1, d_max));
}

Subspace shift_support(const RationalPolynomial& p, const std::optional<std::string>& t_var) {
  if (!p.is_homogeneous()) throw std::invalid_argument("shift_support needs a homogeneous form");
  const std::size_t n = p.num_vars();
  std::size_t t_index = n;
  if (t_var) t_index = p.var_index(*t_var);
  std::vector<std::string> xvars;
  std::vector<std::size_t> shifted;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == t_index) continue;
    xvars.push_back(p.vars()[i]);
    shifted.push_back(i);
  }
  // p(a_t, x + a) = sum over parameter monomials a_t^k a^beta of g_{k,beta}(x);
  // the parameter monomials are independent, so L = span of the g's minus constants.
  std::map<std::vector<int>, RationalPolynomial> pieces;
  std::vector<std::vector<int>> binom;
  for (const auto& [m, c] : p.terms()) {
    std::vector<int> alpha;
    for (std::size_t i : shifted) alpha.push_back(m[i]);
    const int k = t_index < n ? m[t_index] : 0;
    std::vector<int> gamma(alpha.size(), 0);
    // Walk every gamma <= alpha.
    while (true) {
      Rational coeff = c;
      std::vector<int> key{k};
      for (std::size_t i = 0; i < alpha.size(); ++i) {
        coeff *= binomials(alpha[i])[gamma[i]];
        key.push_back(alpha[i] - gamma[i]);
      }
      Monomial xm(gamma);
      if (!xm.is_constant()) {
        auto it = pieces.try_emplace(key, RationalPolynomial(xvars)).first;
        it->second.add_term(xm, coeff);
      }
      std::size_t pos = 0;
      while (pos < gamma.size() && gamma[pos] == alpha[pos]) gamma[pos++] = 0;
      if (pos == gamma.size()) break;
      ++gamma[pos];
    }
  }
  std::vector<RationalPolynomial> gens;
  for (auto& [key, g] : pieces) gens.push_back(std::move(g));
  return Subspace::span(xvars, gens);
}

}  // namespace shadowlab
