#include "shadowlab/puiseux.hpp"

#include <algorithm>
#include <sstream>

namespace shadowlab {

namespace {

std::optional<Rational> min_opt(const std::optional<Rational>& a, const std::optional<Rational>& b) {
  if (!a) return b;
  if (!b) return a;
  return *a < *b ? a : b;
}

}  // namespace

PuiseuxScalar::PuiseuxScalar(const Rational& c) {
  if (c != 0) terms_.push_back({Rational(0), c});
}

PuiseuxScalar PuiseuxScalar::from_terms(std::vector<Term> terms, std::optional<Rational> trunc) {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.order < b.order; });
  PuiseuxScalar out;
  out.trunc_ = std::move(trunc);
  for (auto& t : terms) {
    if (out.trunc_ && t.order >= *out.trunc_) break;
    if (!out.terms_.empty() && out.terms_.back().order == t.order) {
      out.terms_.back().coeff += t.coeff;
    } else {
      out.terms_.push_back(std::move(t));
    }
  }
  std::erase_if(out.terms_, [](const Term& t) { return t.coeff == 0; });
  return out;
}

PuiseuxScalar PuiseuxScalar::monomial(const Rational& coeff, const Rational& order, std::optional<Rational> trunc) {
  return from_terms({{order, coeff}}, std::move(trunc));
}

PuiseuxScalar PuiseuxScalar::epsilon(const Rational& order, std::optional<Rational> trunc) {
  if (order <= 0) throw std::invalid_argument("an infinitesimal needs positive order");
  return monomial(Rational(1), order, std::move(trunc));
}

std::optional<Rational> PuiseuxScalar::order_lower_bound() const {
  if (!terms_.empty()) return terms_.front().order;
  return trunc_;
}

Rational PuiseuxScalar::valuation() const {
  if (terms_.empty()) {
    throw IndeterminateError(is_zero() ? "valuation of zero is undefined"
                                       : "valuation unknown: value is zero up to order " + to_string(*trunc_));
  }
  return terms_.front().order;
}

int PuiseuxScalar::sign() const {
  if (terms_.empty()) {
    throw IndeterminateError(is_zero() ? "sign of zero requested" : "sign unknown: value is zero up to truncation");
  }
  return terms_.front().coeff > 0 ? 1 : -1;
}

bool PuiseuxScalar::in_valuation_ring() const {
  if (!terms_.empty()) return terms_.front().order >= 0;
  if (is_zero()) return true;
  if (*trunc_ >= 0) return true;
  throw IndeterminateError("membership in B unknown below truncation");
}

bool PuiseuxScalar::in_maximal_ideal() const {
  if (!terms_.empty()) return terms_.front().order > 0;
  if (is_zero()) return true;
  if (*trunc_ > 0) return true;
  throw IndeterminateError("membership in m_B unknown below truncation");
}

Rational PuiseuxScalar::residue() const {
  if (!in_valuation_ring()) throw std::domain_error("residue of an element outside the valuation ring");
  if (trunc_ && *trunc_ <= 0) throw IndeterminateError("residue hidden by truncation");
  return coeff_at(Rational(0));
}

Rational PuiseuxScalar::coeff_at(const Rational& order) const {
  if (trunc_ && order >= *trunc_) throw IndeterminateError("coefficient beyond truncation");
  for (const auto& t : terms_)
    if (t.order == order) return t.coeff;
  return Rational(0);
}

PuiseuxScalar PuiseuxScalar::shifted_down(const Rational& k) const {
  PuiseuxScalar out(*this);
  for (auto& t : out.terms_) t.order -= k;
  if (out.trunc_) *out.trunc_ -= k;
  return out;
}

PuiseuxScalar PuiseuxScalar::operator-() const {
  PuiseuxScalar out(*this);
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

PuiseuxScalar operator+(const PuiseuxScalar& a, const PuiseuxScalar& b) {
  std::vector<PuiseuxScalar::Term> terms = a.terms_;
  terms.insert(terms.end(), b.terms_.begin(), b.terms_.end());
  return PuiseuxScalar::from_terms(std::move(terms), min_opt(a.trunc_, b.trunc_));
}

PuiseuxScalar operator*(const PuiseuxScalar& a, const PuiseuxScalar& b) {
  if (a.is_zero() || b.is_zero()) return PuiseuxScalar();
  // Unknown tail of a contributes at orders >= trunc_a + o(b), and symmetrically.
  std::optional<Rational> trunc;
  if (a.trunc_) trunc = min_opt(trunc, Rational(*a.trunc_ + *b.order_lower_bound()));
  if (b.trunc_) trunc = min_opt(trunc, Rational(*b.trunc_ + *a.order_lower_bound()));
  std::vector<PuiseuxScalar::Term> terms;
  terms.reserve(a.terms_.size() * b.terms_.size());
  for (const auto& x : a.terms_)
    for (const auto& y : b.terms_) terms.push_back({x.order + y.order, x.coeff * y.coeff});
  return PuiseuxScalar::from_terms(std::move(terms), std::move(trunc));
}

PuiseuxScalar divide(const PuiseuxScalar& a, const PuiseuxScalar& b, const Rational& trunc_order) {
  if (!b.has_leading_term()) {
    throw std::domain_error(b.is_zero() ? "division by zero" : "division by a value that is zero up to truncation");
  }
  const Rational o = b.terms().front().order;
  const Rational c = b.terms().front().coeff;
  // Absolute truncation of 1/b: limited by the global order and by b's own precision.
  Rational inv_trunc = trunc_order;
  if (b.trunc()) inv_trunc = std::min(inv_trunc, Rational(*b.trunc() - o - o));
  const Rational rel = inv_trunc + o;  // relative precision needed in 1/(1+u)
  PuiseuxScalar inverse;
  if (rel > 0) {
    // u = b / (c t^o) - 1, all orders positive.
    std::vector<PuiseuxScalar::Term> uterms;
    for (std::size_t k = 1; k < b.terms().size(); ++k)
      uterms.push_back({b.terms()[k].order - o, b.terms()[k].coeff / c});
    PuiseuxScalar minus_u = -PuiseuxScalar::from_terms(uterms, rel);
    PuiseuxScalar sum = PuiseuxScalar::from_terms({{Rational(0), Rational(1)}}, rel);
    PuiseuxScalar power = sum;
    if (minus_u.has_leading_term()) {
      const Rational step = minus_u.terms().front().order;
      for (Rational reached = step; reached < rel; reached += step) {
        power = power * minus_u;
        sum = sum + power;
      }
    }
    sum = PuiseuxScalar::from_terms(sum.terms(), rel);
    std::vector<PuiseuxScalar::Term> scaled;
    for (const auto& t : sum.terms()) scaled.push_back({t.order - o, t.coeff / c});
    inverse = PuiseuxScalar::from_terms(std::move(scaled), inv_trunc);
  } else {
    inverse = PuiseuxScalar::from_terms({}, inv_trunc);
  }
  return a * inverse;
}

PuiseuxScalar operator/(const PuiseuxScalar& a, const PuiseuxScalar& b) {
  return divide(a, b, Rational(kDefaultTruncationOrder));
}

std::string PuiseuxScalar::str() const {
  std::ostringstream os;
  if (terms_.empty()) os << "0";
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    os << "(" << terms_[i].coeff << ")";
    if (terms_[i].order != 0) os << "*t^(" << terms_[i].order << ")";
  }
  if (trunc_) os << " + O(t^(" << *trunc_ << "))";
  return os.str();
}

PuiseuxPolynomial promote(const RationalPolynomial& f) {
  PuiseuxPolynomial out(f.vars());
  for (const auto& [m, c] : f.terms()) out.add_term(m, PuiseuxScalar(c));
  return out;
}

PuiseuxPolynomial divide_eps_power(const PuiseuxPolynomial& f, const Rational& k) {
  PuiseuxPolynomial out(f.vars());
  for (const auto& [m, c] : f.terms()) {
    bool divisible = c.has_leading_term() ? c.valuation() >= k : (c.trunc() && *c.trunc() >= k);
    if (!divisible) {
      throw std::domain_error("coefficient " + c.str() + " is not divisible by t^(" + to_string(k) + ")");
    }
    out.add_term(m, c.shifted_down(k));
  }
  return out;
}

RationalPolynomial residue(const PuiseuxPolynomial& f) {
  RationalPolynomial out(f.vars());
  for (const auto& [m, c] : f.terms()) {
    if (!c.in_valuation_ring()) throw std::domain_error("coefficient " + c.str() + " lies outside B");
    out.add_term(m, c.residue());
  }
  return out;
}

std::map<Rational, RationalPolynomial> split_by_order(const PuiseuxPolynomial& f) {
  std::map<Rational, RationalPolynomial> out;
  for (const auto& [m, c] : f.terms()) {
    if (!c.is_exact()) throw IndeterminateError("split_by_order needs exact coefficients");
    for (const auto& t : c.terms()) {
      auto it = out.try_emplace(t.order, RationalPolynomial(f.vars())).first;
      it->second.add_term(m, t.coeff);
    }
  }
  return out;
}

}  // namespace shadowlab
