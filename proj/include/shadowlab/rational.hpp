#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

namespace shadowlab {

// Arbitrary precision rational. Expression templates are off so the type
// behaves as a plain value inside Eigen matrices.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

using RationalMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;
using RationalVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;

/// Parses "p/q", an integer, or a finite decimal such as "-0.125".
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
double to_double(const Rational& q);

/// Exact value of a double (every finite double is a dyadic rational).
Rational exact_rational(double x);

/// Best rational approximation with denominator at most `max_denominator`
/// (continued fractions with semiconvergents).
Rational approximate_rational(double x, std::int64_t max_denominator);

RationalMatrix approximate_rational(const Eigen::MatrixXd& m, std::int64_t max_denominator);
Eigen::MatrixXd to_double(const RationalMatrix& m);

struct RowEchelon {
  RationalMatrix reduced;   // reduced row echelon form, zero rows dropped
  std::vector<int> pivots;  // pivot column of each row
};

/// Gauss-Jordan elimination. Pivots are taken left to right.
RowEchelon row_reduce(RationalMatrix m);

int rank(const RationalMatrix& m);

/// Some solution of A x = b (free variables set to zero), or nullopt.
std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b);

/// Columns form a basis of {x : A x = 0}.
RationalMatrix nullspace(const RationalMatrix& a);

/// Exact rank-one decomposition of a symmetric matrix, G = sum_k w_k v_k v_k^T,
/// computed by LDL^T with diagonal pivoting. Weights are strictly positive.
/// Returns nullopt iff G is not positive semidefinite.
struct PsdFactorization {
  std::vector<Rational> weights;
  std::vector<RationalVector> vectors;
};
std::optional<PsdFactorization> factor_psd(const RationalMatrix& g);

}  // namespace shadowlab
