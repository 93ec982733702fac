#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace shadowlab {

/// Exponent vector x^alpha, one entry per ambient variable.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::size_t num_vars) : exps_(num_vars, 0) {}
  explicit Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
    for (int e : exps_)
      if (e < 0) throw std::invalid_argument("monomial exponents must be non-negative");
  }
  Monomial(std::initializer_list<int> exps) : Monomial(std::vector<int>(exps)) {}

  static Monomial unit(std::size_t num_vars, std::size_t var) {
    Monomial m(num_vars);
    m.exps_.at(var) = 1;
    return m;
  }

  std::size_t size() const { return exps_.size(); }
  int operator[](std::size_t i) const { return exps_[i]; }
  const std::vector<int>& exponents() const { return exps_; }
  int degree() const { return std::accumulate(exps_.begin(), exps_.end(), 0); }
  bool is_constant() const { return degree() == 0; }

  Monomial operator*(const Monomial& other) const {
    if (other.size() != size()) throw std::invalid_argument("monomial arity mismatch");
    Monomial out(*this);
    for (std::size_t i = 0; i < size(); ++i) out.exps_[i] += other.exps_[i];
    return out;
  }

  bool divides(const Monomial& other) const {
    for (std::size_t i = 0; i < size(); ++i)
      if (exps_[i] > other.exps_[i]) return false;
    return true;
  }

  bool operator==(const Monomial& other) const = default;

 private:
  std::vector<int> exps_;
};

/// Graded lexicographic order: lower total degree first; within a degree,
/// larger exponents on earlier variables come first (x^2, xy, y^2).
/// Used everywhere a monomial list must be enumerated deterministically.
struct GradedLexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] != b[i]) return a[i] > b[i];
    }
    return false;
  }
};

/// All monomials in `num_vars` variables with min_degree <= degree <= max_degree,
/// in graded lexicographic order.
inline std::vector<Monomial> monomials_up_to(std::size_t num_vars, int min_degree, int max_degree) {
  std::vector<Monomial> out;
  std::vector<int> e(num_vars, 0);
  for (int d = min_degree; d <= max_degree; ++d) {
    if (num_vars == 0) {
      if (d == 0) out.emplace_back(std::vector<int>{});
      continue;
    }
    // Enumerate compositions of d in lex-descending order.
    auto rec = [&](auto&& self, std::size_t pos, int remaining) -> void {
      if (pos + 1 == num_vars) {
        e[pos] = remaining;
        out.emplace_back(e);
        return;
      }
      for (int k = remaining; k >= 0; --k) {
        e[pos] = k;
        self(self, pos + 1, remaining - k);
      }
    };
    rec(rec, 0, d);
  }
  return out;
}

}  // namespace shadowlab
