#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "shadowlab/polynomial.hpp"
#include "shadowlab/puiseux.hpp"
#include "shadowlab/rational.hpp"

namespace shadowlab {

/// Finite-dimensional subspace of R[x] with a fixed ordered basis.
/// Linear independence of the basis is checked on construction.
class Subspace {
 public:
  Subspace() = default;
  /// Throws std::invalid_argument when the basis is dependent.
  Subspace(std::vector<std::string> vars, std::vector<RationalPolynomial> basis);

  /// Basis extracted from an arbitrary spanning family (reduced row echelon
  /// rows, so the result does not depend on the family's order).
  static Subspace span(std::vector<std::string> vars, const std::vector<RationalPolynomial>& generators);
  static Subspace from_monomials(std::vector<std::string> vars, const std::vector<Monomial>& monomials);

  const std::vector<std::string>& vars() const { return vars_; }
  const std::vector<RationalPolynomial>& basis() const { return basis_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  bool contains_one() const { return contains_one_; }

  /// Monomials occurring in some basis element, graded-lex order.
  const std::vector<Monomial>& support() const { return support_; }

  /// Coordinates of f in the stored basis, or nullopt when f is not in the span.
  std::optional<RationalVector> coordinates(const RationalPolynomial& f) const;
  bool contains(const RationalPolynomial& f) const { return coordinates(f).has_value(); }
  /// Membership in L_B = L tensor B: every t-order slice lies in L and no
  /// coefficient has negative order. Coefficients must be exact.
  bool contains(const PuiseuxPolynomial& f) const;

  /// R1 + L.
  Subspace with_one() const;

  /// True when every basis element is a single monomial.
  bool is_monomial() const;

 private:
  std::vector<std::string> vars_;
  std::vector<RationalPolynomial> basis_;
  std::vector<Monomial> support_;
  std::map<Monomial, int, GradedLexLess> support_index_;
  // rref_ = transform_ * (basis as rows in support coordinates)
  RationalMatrix rref_;
  RationalMatrix transform_;
  std::vector<int> pivots_;
  bool contains_one_ = false;
};

/// Default variable names x1..xn.
std::vector<std::string> default_vars(int n, const std::string& stem = "x");

/// Monomials of degree 1..d_max (and 1 when requested) in n variables.
Subspace monomial_subspace(int n, int d_max, bool include_constant, std::vector<std::string> vars = {});

/// Minimal subspace L (constants removed) such that
/// p(a_t, x + a) lies in R1 + L for every real tuple, where a_t is the value
/// of the optional unshifted variable t and every other variable is shifted.
/// Requires p homogeneous. The result lives in the shifted variables.
Subspace shift_support(const RationalPolynomial& p, const std::optional<std::string>& t_var = std::nullopt);

/// Human-readable rendering, e.g. "3/2*x1^2*x2 - x2 + 1".
std::string to_string(const RationalPolynomial& f);
std::string to_string(const PuiseuxPolynomial& f);

/// Floating evaluation.
double evaluate(const RationalPolynomial& f, const std::vector<double>& point);

/// Coefficient vectors of the given polynomials over a shared monomial index.
/// Rows follow `monomials`; monomials absent from the list must not occur.
RationalMatrix coefficient_matrix(const std::vector<RationalPolynomial>& polys, const std::vector<Monomial>& monomials);

}  // namespace shadowlab
