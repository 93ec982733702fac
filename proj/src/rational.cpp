#include "shadowlab/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace shadowlab {

namespace {

using Integer = boost::multiprecision::mpz_int;

Integer floor_of(const Rational& r) {
  Integer n = numerator(r);
  Integer d = denominator(r);
  Integer q = n / d;  // truncates toward zero
  if (n < 0 && q * d != n) q -= 1;
  return q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.erase(v.begin());
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.pop_back();
  };
  trim(s);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  try {
    auto dot = s.find('.');
    auto exp = s.find_first_of("eE");
    if (dot == std::string::npos && exp == std::string::npos) {
      return Rational(s);
    }
    // Decimal literal: interpret exactly as written, not through a double.
    std::string mantissa = exp == std::string::npos ? s : s.substr(0, exp);
    long exponent = exp == std::string::npos ? 0 : std::stol(s.substr(exp + 1));
    bool negative = !mantissa.empty() && mantissa[0] == '-';
    if (!mantissa.empty() && (mantissa[0] == '-' || mantissa[0] == '+')) mantissa.erase(0, 1);
    std::string digits;
    long frac_digits = 0;
    bool after_dot = false;
    for (char c : mantissa) {
      if (c == '.') {
        if (after_dot) throw std::invalid_argument("bad decimal");
        after_dot = true;
        continue;
      }
      if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad decimal");
      digits.push_back(c);
      if (after_dot) ++frac_digits;
    }
    if (digits.empty()) throw std::invalid_argument("bad decimal");
    // A leading 0 would make GMP read the digits as octal.
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    Rational value{Integer(digits)};
    long shift = exponent - frac_digits;
    Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(shift)));
    if (shift >= 0) {
      value *= Rational(ten_pow);
    } else {
      value /= Rational(ten_pow);
    }
    return negative ? Rational(-value) : value;
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::invalid_argument("cannot parse rational '" + s + "': " + e.what());
  }
}

std::string to_string(const Rational& q) { return q.str(); }

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational exact_rational(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("non-finite value has no rational form");
  return Rational(x);
}

Rational approximate_rational(double x, std::int64_t max_denominator) {
  if (max_denominator < 1) throw std::invalid_argument("denominator bound must be >= 1");
  Rational r = exact_rational(x);
  const Integer bound(max_denominator);
  Integer h2 = 0, h1 = 1, k2 = 1, k1 = 0;
  Rational rest = r;
  while (true) {
    Integer a = floor_of(rest);
    Integer h = a * h1 + h2;
    Integer k = a * k1 + k2;
    if (k > bound) {
      // Best semiconvergent below the bound competes with the last convergent.
      Integer t = (bound - k2) / k1;
      Rational semi(Integer(t * h1 + h2), Integer(t * k1 + k2));
      Rational conv(h1, k1);
      return abs(semi - r) < abs(conv - r) ? semi : conv;
    }
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    Rational frac = rest - Rational(a);
    if (frac == 0) return Rational(h1, k1);
    rest = 1 / frac;
  }
}

RationalMatrix approximate_rational(const Eigen::MatrixXd& m, std::int64_t max_denominator) {
  RationalMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = approximate_rational(m(i, j), max_denominator);
  return out;
}

Eigen::MatrixXd to_double(const RationalMatrix& m) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
  return out;
}

RowEchelon row_reduce(RationalMatrix m) {
  RowEchelon out;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = r; i < rows; ++i) {
      if (m(i, c) != 0) {
        piv = i;
        break;
      }
    }
    if (piv < 0) continue;
    if (piv != r) m.row(piv).swap(m.row(r));
    Rational inv = 1 / m(r, c);
    for (Eigen::Index j = c; j < cols; ++j) m(r, j) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (Eigen::Index j = c; j < cols; ++j) {
        if (m(r, j) != 0) m(i, j) -= f * m(r, j);
      }
    }
    out.pivots.push_back(static_cast<int>(c));
    ++r;
  }
  out.reduced = m.topRows(r);
  return out;
}

int rank(const RationalMatrix& m) { return static_cast<int>(row_reduce(m).pivots.size()); }

std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve: dimension mismatch");
  RationalMatrix aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  RowEchelon e = row_reduce(aug);
  RationalVector x = RationalVector::Constant(a.cols(), Rational(0));
  for (std::size_t i = 0; i < e.pivots.size(); ++i) {
    if (e.pivots[i] == a.cols()) return std::nullopt;
    x(e.pivots[i]) = e.reduced(static_cast<Eigen::Index>(i), a.cols());
  }
  return x;
}

RationalMatrix nullspace(const RationalMatrix& a) {
  RowEchelon e = row_reduce(a);
  std::vector<bool> is_pivot(a.cols(), false);
  for (int p : e.pivots) is_pivot[p] = true;
  std::vector<Eigen::Index> free_cols;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    if (!is_pivot[c]) free_cols.push_back(c);
  RationalMatrix basis = RationalMatrix::Constant(a.cols(), static_cast<Eigen::Index>(free_cols.size()), Rational(0));
  for (std::size_t k = 0; k < free_cols.size(); ++k) {
    basis(free_cols[k], static_cast<Eigen::Index>(k)) = 1;
    for (std::size_t i = 0; i < e.pivots.size(); ++i) {
      basis(e.pivots[i], static_cast<Eigen::Index>(k)) = -e.reduced(static_cast<Eigen::Index>(i), free_cols[k]);
    }
  }
  return basis;
}

std::optional<PsdFactorization> factor_psd(const RationalMatrix& g) {
  if (g.rows() != g.cols()) throw std::invalid_argument("factor_psd: matrix not square");
  const Eigen::Index n = g.rows();
  RationalMatrix work = g;
  std::vector<bool> done(n, false);
  PsdFactorization out;
  for (Eigen::Index step = 0; step < n; ++step) {
    Eigen::Index p = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (p < 0 || work(i, i) > work(p, p)) p = i;
    }
    if (work(p, p) < 0) return std::nullopt;
    if (work(p, p) == 0) {
      // Remaining block must vanish identically.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (done[i]) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (!done[j] && work(i, j) != 0) return std::nullopt;
        }
      }
      break;
    }
    Rational d = work(p, p);
    RationalVector v = RationalVector::Constant(n, Rational(0));
    for (Eigen::Index i = 0; i < n; ++i)
      if (!done[i]) v(i) = work(i, p) / d;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (done[i] || v(i) == 0) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!done[j] && v(j) != 0) work(i, j) -= d * v(i) * v(j);
      }
    }
    done[p] = true;
    out.weights.push_back(d);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace shadowlab
