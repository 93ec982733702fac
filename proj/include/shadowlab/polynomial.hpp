#pragma once

#include <algorithm>
#include <climits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadowlab/monomial.hpp"
#include "shadowlab/rational.hpp"

namespace shadowlab {

/// Scalar domains plug into Polynomial through this traits class.
template <typename Scalar>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static bool is_zero(const Rational& q) { return q == 0; }
};

/// Sentinel degree of the zero polynomial.
inline constexpr int kZeroPolynomialDegree = INT_MIN;

/// Sparse multivariate polynomial over a scalar domain. Terms are kept in
/// graded lexicographic order and never store a (known) zero coefficient.
template <typename Scalar>
class Polynomial {
 public:
  using Traits = ScalarTraits<Scalar>;
  using TermMap = std::map<Monomial, Scalar, GradedLexLess>;

  Polynomial() = default;
  explicit Polynomial(std::vector<std::string> vars) : vars_(std::move(vars)) { check_vars(); }
  Polynomial(std::vector<std::string> vars, const TermMap& terms) : vars_(std::move(vars)) {
    check_vars();
    for (const auto& [m, c] : terms) add_term(m, c);
  }

  static Polynomial constant(std::vector<std::string> vars, const Scalar& c) {
    Polynomial p(std::move(vars));
    p.add_term(Monomial(p.vars_.size()), c);
    return p;
  }
  static Polynomial variable(std::vector<std::string> vars, const std::string& name) {
    Polynomial p(std::move(vars));
    p.add_term(Monomial::unit(p.vars_.size(), p.var_index(name)), Traits::one());
    return p;
  }
  static Polynomial monomial(std::vector<std::string> vars, const Monomial& m, const Scalar& c) {
    Polynomial p(std::move(vars));
    if (m.size() != p.vars_.size()) throw std::invalid_argument("monomial arity does not match variables");
    p.add_term(m, c);
    return p;
  }

  const std::vector<std::string>& vars() const { return vars_; }
  std::size_t num_vars() const { return vars_.size(); }
  const TermMap& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  std::size_t var_index(const std::string& name) const {
    auto it = std::find(vars_.begin(), vars_.end(), name);
    if (it == vars_.end()) throw std::invalid_argument("unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - vars_.begin());
  }
  bool has_var(const std::string& name) const {
    return std::find(vars_.begin(), vars_.end(), name) != vars_.end();
  }

  /// Total degree; kZeroPolynomialDegree for the zero polynomial.
  int degree() const { return terms_.empty() ? kZeroPolynomialDegree : terms_.rbegin()->first.degree(); }
  int min_degree() const { return terms_.empty() ? kZeroPolynomialDegree : terms_.begin()->first.degree(); }
  int degree_in(std::size_t var) const {
    int d = kZeroPolynomialDegree;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
  }

  Scalar coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Traits::zero() : it->second;
  }
  Scalar constant_term() const { return coeff(Monomial(vars_.size())); }

  bool is_homogeneous() const {
    if (terms_.empty()) return true;
    return terms_.begin()->first.degree() == terms_.rbegin()->first.degree();
  }

  Polynomial homogeneous_part(int k) const {
    Polynomial out(vars_);
    for (const auto& [m, c] : terms_)
      if (m.degree() == k) out.terms_.emplace(m, c);
    return out;
  }

  Polynomial without_constant() const {
    Polynomial out(*this);
    out.terms_.erase(Monomial(vars_.size()));
    return out;
  }

  Polynomial operator-() const {
    Polynomial out(vars_);
    for (const auto& [m, c] : terms_) out.terms_.emplace(m, Scalar(-c));
    return out;
  }

  Polynomial& operator+=(const Polynomial& other) {
    check_compatible(other);
    for (const auto& [m, c] : other.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& other) {
    check_compatible(other);
    for (const auto& [m, c] : other.terms_) add_term(m, Scalar(-c));
    return *this;
  }
  Polynomial& operator*=(const Scalar& s) {
    TermMap next;
    for (const auto& [m, c] : terms_) {
      Scalar v = c * s;
      if (!Traits::is_zero(v)) next.emplace(m, std::move(v));
    }
    terms_ = std::move(next);
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Scalar& s) { return a *= s; }
  friend Polynomial operator*(const Scalar& s, Polynomial a) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    a.check_compatible(b);
    Polynomial out(a.vars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, Scalar(ca * cb));
    return out;
  }

  Polynomial& operator*=(const Polynomial& other) { return *this = *this * other; }

  bool operator==(const Polynomial& other) const {
    return vars_ == other.vars_ && terms_ == other.terms_;
  }
  bool operator!=(const Polynomial& other) const { return !(*this == other); }

  Polynomial pow(int k) const {
    if (k < 0) throw std::invalid_argument("negative polynomial power");
    Polynomial result = constant(vars_, Traits::one());
    Polynomial base = *this;
    while (k > 0) {
      if (k & 1) result *= base;
      k >>= 1;
      if (k) base *= base;
    }
    return result;
  }

  Scalar evaluate(std::span<const Scalar> point) const {
    if (point.size() != vars_.size()) throw std::invalid_argument("evaluation point has wrong dimension");
    Scalar total = Traits::zero();
    for (const auto& [m, c] : terms_) {
      Scalar v = c;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (int e = 0; e < m[i]; ++e) v = v * point[i];
      total = total + v;
    }
    return total;
  }

  /// Adds c * x^m; drops the entry if the coefficient cancels.
  void add_term(const Monomial& m, const Scalar& c) {
    if (m.size() != vars_.size()) throw std::invalid_argument("monomial arity does not match variables");
    if (Traits::is_zero(c)) return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second = it->second + c;
      if (Traits::is_zero(it->second)) terms_.erase(it);
    }
  }

  void check_compatible(const Polynomial& other) const {
    if (vars_ != other.vars_) throw std::invalid_argument("polynomial variable lists differ");
  }

 private:
  void check_vars() const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
      for (std::size_t j = i + 1; j < vars_.size(); ++j)
        if (vars_[i] == vars_[j]) throw std::invalid_argument("duplicate variable '" + vars_[i] + "'");
  }

  std::vector<std::string> vars_;
  TermMap terms_;
};

using RationalPolynomial = Polynomial<Rational>;

/// Composes f with images given per variable name. Every variable that
/// occurs in f must be assigned; all images share one variable list, which
/// becomes the variable list of the result.
template <typename Scalar>
Polynomial<Scalar> substitute(const Polynomial<Scalar>& f,
                              const std::map<std::string, Polynomial<Scalar>>& assignment,
                              std::vector<std::string> result_vars) {
  using Traits = ScalarTraits<Scalar>;
  const std::size_t n = f.num_vars();
  std::vector<const Polynomial<Scalar>*> images(n, nullptr);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = assignment.find(f.vars()[i]);
    if (it != assignment.end()) {
      if (it->second.vars() != result_vars)
        throw std::invalid_argument("substitution image for '" + f.vars()[i] + "' uses a different variable list");
      images[i] = &it->second;
    } else if (f.degree_in(i) > 0) {
      throw std::invalid_argument("variable '" + f.vars()[i] + "' is not assigned");
    }
  }
  // Cache powers per variable.
  std::vector<std::vector<Polynomial<Scalar>>> powers(n);
  for (std::size_t i = 0; i < n; ++i) {
    int deg = f.is_zero() ? 0 : f.degree_in(i);
    powers[i].push_back(Polynomial<Scalar>::constant(result_vars, Traits::one()));
    for (int k = 1; k <= deg; ++k) powers[i].push_back(powers[i].back() * *images[i]);
  }
  Polynomial<Scalar> out(result_vars);
  for (const auto& [m, c] : f.terms()) {
    Polynomial<Scalar> term = Polynomial<Scalar>::constant(result_vars, c);
    for (std::size_t i = 0; i < n; ++i)
      if (m[i] > 0) term *= powers[i][m[i]];
    out += term;
  }
  return out;
}

template <typename Scalar>
Polynomial<Scalar> substitute(const Polynomial<Scalar>& f,
                              const std::map<std::string, Polynomial<Scalar>>& assignment) {
  return substitute(f, assignment, f.vars());
}

/// Returns f(x + xi).
template <typename Scalar>
Polynomial<Scalar> shift(const Polynomial<Scalar>& f, std::span<const Scalar> xi) {
  if (xi.size() != f.num_vars()) throw std::invalid_argument("shift point has wrong dimension");
  std::map<std::string, Polynomial<Scalar>> assignment;
  for (std::size_t i = 0; i < f.num_vars(); ++i) {
    const auto& v = f.vars()[i];
    assignment.emplace(v, Polynomial<Scalar>::variable(f.vars(), v) +
                              Polynomial<Scalar>::constant(f.vars(), xi[i]));
  }
  return substitute(f, assignment);
}

template <typename Scalar>
Polynomial<Scalar> shift(const Polynomial<Scalar>& f, const std::vector<Scalar>& xi) {
  return shift(f, std::span<const Scalar>(xi));
}

/// Homogenizes with a new leading variable: x0^deg(f) f(x/x0).
template <typename Scalar>
Polynomial<Scalar> homogenize(const Polynomial<Scalar>& f, const std::string& new_var) {
  if (f.has_var(new_var)) throw std::invalid_argument("variable '" + new_var + "' already present");
  std::vector<std::string> vars{new_var};
  vars.insert(vars.end(), f.vars().begin(), f.vars().end());
  Polynomial<Scalar> out(vars);
  const int d = f.degree();
  for (const auto& [m, c] : f.terms()) {
    std::vector<int> e{d - m.degree()};
    e.insert(e.end(), m.exponents().begin(), m.exponents().end());
    out.add_term(Monomial(std::move(e)), c);
  }
  return out;
}

/// Sets `var` to 1 and removes it from the variable list. Input must be a form.
template <typename Scalar>
Polynomial<Scalar> dehomogenize(const Polynomial<Scalar>& F, const std::string& var) {
  if (!F.is_homogeneous()) throw std::invalid_argument("dehomogenize: input is not homogeneous");
  const std::size_t k = F.var_index(var);
  std::vector<std::string> vars;
  for (std::size_t i = 0; i < F.num_vars(); ++i)
    if (i != k) vars.push_back(F.vars()[i]);
  Polynomial<Scalar> out(vars);
  for (const auto& [m, c] : F.terms()) {
    std::vector<int> e;
    for (std::size_t i = 0; i < m.size(); ++i)
      if (i != k) e.push_back(m[i]);
    out.add_term(Monomial(std::move(e)), c);
  }
  return out;
}

/// Homogeneous component of minimal total degree.
template <typename Scalar>
Polynomial<Scalar> lowest_form(const Polynomial<Scalar>& f) {
  if (f.is_zero()) throw std::invalid_argument("lowest_form of the zero polynomial");
  return f.homogeneous_part(f.min_degree());
}

}  // namespace shadowlab
