#pragma once

#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shadowlab/puiseux.hpp"
#include "shadowlab/subspace.hpp"

namespace shadowlab::testing {

inline Rational random_rational(std::mt19937_64& rng, int num = 9, int den = 5) {
  std::uniform_int_distribution<int> n(-num, num), d(1, den);
  return Rational(n(rng), d(rng));
}

inline RationalPolynomial random_polynomial(std::mt19937_64& rng, const std::vector<std::string>& vars, int max_deg,
                                            int terms = 4) {
  RationalPolynomial f(vars);
  const auto ms = monomials_up_to(vars.size(), 0, max_deg);
  std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
  for (int k = 0; k < terms; ++k) f += RationalPolynomial::monomial(vars, ms[pick(rng)], random_rational(rng));
  return f;
}

inline RationalPolynomial random_form(std::mt19937_64& rng, const std::vector<std::string>& vars, int deg, int terms = 5) {
  RationalPolynomial f(vars);
  const auto ms = monomials_up_to(vars.size(), deg, deg);
  std::uniform_int_distribution<std::size_t> pick(0, ms.size() - 1);
  for (int k = 0; k < terms; ++k) f += RationalPolynomial::monomial(vars, ms[pick(rng)], random_rational(rng));
  return f;
}

/// Exact nonzero Puiseux value, 1..3 terms, orders in [lo, lo + 3) with denominators <= 9.
inline PuiseuxScalar random_puiseux(std::mt19937_64& rng, int lo = -2) {
  std::uniform_int_distribution<int> count(1, 3), num(0, 8), den(1, 3), coeff(-5, 5);
  for (;;) {
    std::vector<PuiseuxScalar::Term> terms;
    const int k = count(rng);
    for (int i = 0; i < k; ++i) {
      int c = coeff(rng);
      if (c == 0) c = 1;
      terms.push_back({Rational(lo) + Rational(num(rng), den(rng)) / 3, Rational(c)});
    }
    auto a = PuiseuxScalar::from_terms(std::move(terms));
    if (!a.is_zero()) return a;
  }
}

inline Eigen::MatrixXd random_psd(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = g(rng);
  return G * G.transpose();
}

/// [[x1, x2], [x2, x3]].
inline std::vector<Eigen::MatrixXd> psd2_matrices() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2), b = a, c = a;
  a(0, 0) = 1;
  b(0, 1) = b(1, 0) = 1;
  c(1, 1) = 1;
  return {a, b, c};
}

/// [[x0 + x1, x2], [x2, x0 - x1]].
inline std::vector<Eigen::MatrixXd> disk_cone_matrices() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(2, 2), b = Eigen::MatrixXd::Zero(2, 2), c = b;
  b(0, 0) = 1;
  b(1, 1) = -1;
  c(0, 1) = c(1, 0) = 1;
  return {a, b, c};
}

}  // namespace shadowlab::testing
