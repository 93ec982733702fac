#include <cmath>
#include <sstream>

#include "shadowlab/subspace.hpp"

namespace shadowlab {

namespace {

template <typename Scalar, typename CoeffFn>
std::string render(const Polynomial<Scalar>& f, CoeffFn coeff_str) {
  if (f.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : f.terms()) {
    if (!first) os << " + ";
    first = false;
    std::string cs = coeff_str(c);
    bool unit = cs == "1";
    if (!unit || m.is_constant()) os << cs;
    bool need_star = !unit;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i] == 0) continue;
      if (need_star) os << "*";
      os << f.vars()[i];
      if (m[i] > 1) os << "^" << m[i];
      need_star = true;
    }
  }
  return os.str();
}

}  // namespace

std::string to_string(const RationalPolynomial& f) {
  return render(f, [](const Rational& c) {
    std::string s = c.str();
    return s.find('/') != std::string::npos || c < 0 ? "(" + s + ")" : s;
  });
}

std::string to_string(const PuiseuxPolynomial& f) {
  return render(f, [](const PuiseuxScalar& c) { return "(" + c.str() + ")"; });
}

double evaluate(const RationalPolynomial& f, const std::vector<double>& point) {
  if (point.size() != f.num_vars()) throw std::invalid_argument("evaluation point has wrong dimension");
  double total = 0.0;
  for (const auto& [m, c] : f.terms()) {
    double v = to_double(c);
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) v *= std::pow(point[i], m[i]);
    total += v;
  }
  return total;
}

RationalMatrix coefficient_matrix(const std::vector<RationalPolynomial>& polys, const std::vector<Monomial>& monomials) {
  std::map<Monomial, Eigen::Index, GradedLexLess> index;
  for (std::size_t i = 0; i < monomials.size(); ++i) index.emplace(monomials[i], static_cast<Eigen::Index>(i));
  RationalMatrix out = RationalMatrix::Constant(static_cast<Eigen::Index>(monomials.size()),
                                                static_cast<Eigen::Index>(polys.size()), Rational(0));
  for (std::size_t j = 0; j < polys.size(); ++j) {
    for (const auto& [m, c] : polys[j].terms()) {
      auto it = index.find(m);
      if (it == index.end()) throw std::invalid_argument("polynomial has a monomial outside the index");
      out(it->second, static_cast<Eigen::Index>(j)) = c;
    }
  }
  return out;
}

}  // namespace shadowlab
