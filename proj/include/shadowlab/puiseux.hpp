#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadowlab/polynomial.hpp"
#include "shadowlab/rational.hpp"

namespace shadowlab {

inline constexpr int kDefaultTruncationOrder = 12;

/// Raised when a computation needs a leading term that the truncation hides.
class IndeterminateError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Truncated Puiseux series sum_k c_k t^{q_k} with rational orders, an element
/// of the real closed field of Puiseux series. t is a positive infinitesimal.
///
/// A value is either exact (every term known) or truncated at an order T:
/// terms of order >= T are unknown. A truncated value with no known term is
/// "zero up to T" and is neither zero nor nonzero; consumers that need a
/// leading term throw IndeterminateError on it.
class PuiseuxScalar {
 public:
  struct Term {
    Rational order;
    Rational coeff;
    bool operator==(const Term&) const = default;
  };

  PuiseuxScalar() = default;
  PuiseuxScalar(const Rational& c);  // NOLINT: rationals embed as exact constants
  PuiseuxScalar(int c) : PuiseuxScalar(Rational(c)) {}  // NOLINT

  /// Normalizes: sorts by order, merges equal orders, drops zeros and any
  /// term at or beyond the truncation.
  static PuiseuxScalar from_terms(std::vector<Term> terms, std::optional<Rational> trunc = std::nullopt);
  static PuiseuxScalar monomial(const Rational& coeff, const Rational& order,
                                std::optional<Rational> trunc = std::nullopt);
  /// The infinitesimal t^order (order > 0).
  static PuiseuxScalar epsilon(const Rational& order = Rational(1), std::optional<Rational> trunc = std::nullopt);

  const std::vector<Term>& terms() const { return terms_; }
  const std::optional<Rational>& trunc() const { return trunc_; }
  bool is_exact() const { return !trunc_.has_value(); }

  bool is_zero() const { return terms_.empty() && !trunc_; }
  bool is_indeterminate() const { return terms_.empty() && trunc_.has_value(); }
  bool has_leading_term() const { return !terms_.empty(); }

  /// Order of the leading term.
  Rational valuation() const;
  /// Sign of the leading coefficient (the field ordering has t > 0 infinitesimal).
  int sign() const;
  /// Membership in the valuation ring B (order >= 0).
  bool in_valuation_ring() const;
  /// Membership in the maximal ideal of B (order > 0).
  bool in_maximal_ideal() const;
  /// Image under B -> B/m_B = reals: the coefficient of t^0.
  Rational residue() const;

  /// Multiplies by t^{-k}; every order moves down by k.
  PuiseuxScalar shifted_down(const Rational& k) const;

  /// Coefficient of t^order if known.
  Rational coeff_at(const Rational& order) const;

  PuiseuxScalar operator-() const;
  friend PuiseuxScalar operator+(const PuiseuxScalar& a, const PuiseuxScalar& b);
  friend PuiseuxScalar operator-(const PuiseuxScalar& a, const PuiseuxScalar& b) { return a + (-b); }
  friend PuiseuxScalar operator*(const PuiseuxScalar& a, const PuiseuxScalar& b);
  /// Division truncating infinite expansions at kDefaultTruncationOrder.
  friend PuiseuxScalar operator/(const PuiseuxScalar& a, const PuiseuxScalar& b);

  bool operator==(const PuiseuxScalar& other) const = default;

  std::string str() const;

 private:
  // Smallest order any nonzero part of the value can have; empty for exact zero.
  std::optional<Rational> order_lower_bound() const;

  std::vector<Term> terms_;
  std::optional<Rational> trunc_;
};

/// a / b with infinite expansions cut at `trunc_order`.
PuiseuxScalar divide(const PuiseuxScalar& a, const PuiseuxScalar& b, const Rational& trunc_order);

template <>
struct ScalarTraits<PuiseuxScalar> {
  static PuiseuxScalar zero() { return PuiseuxScalar(); }
  static PuiseuxScalar one() { return PuiseuxScalar(Rational(1)); }
  static bool is_zero(const PuiseuxScalar& a) { return a.is_zero(); }
};

using PuiseuxPolynomial = Polynomial<PuiseuxScalar>;

/// Explicit promotion from rational coefficients.
PuiseuxPolynomial promote(const RationalPolynomial& f);

/// Coefficient-wise division by t^k. Throws std::domain_error when some
/// coefficient has valuation below k.
PuiseuxPolynomial divide_eps_power(const PuiseuxPolynomial& f, const Rational& k);

/// Coefficient-wise reduction modulo m_B. Throws std::domain_error when some
/// coefficient lies outside B.
RationalPolynomial residue(const PuiseuxPolynomial& f);

/// Splits f = sum_q t^q f_q into rational polynomials keyed by order.
/// Throws IndeterminateError when a coefficient is truncated.
std::map<Rational, RationalPolynomial> split_by_order(const PuiseuxPolynomial& f);

}  // namespace shadowlab
