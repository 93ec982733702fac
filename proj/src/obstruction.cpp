#include "shadowlab/obstruction.hpp"

#include <map>
#include <sstream>

namespace shadowlab {

std::string to_string(ObstructionVerdict v) {
  switch (v) {
    case ObstructionVerdict::Obstructed: return "obstructed";
    case ObstructionVerdict::NotObstructed: return "not_obstructed";
    case ObstructionVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

std::vector<RationalPolynomial> monomials_of_degree(const std::vector<std::string>& vars, int lo, int hi) {
  std::vector<RationalPolynomial> out;
  for (const auto& m : monomials_up_to(vars.size(), lo, hi))
    out.push_back(RationalPolynomial::monomial(vars, m, Rational(1)));
  return out;
}

void apply_sos(ObstructionReport& rep, const RationalPolynomial& w, const std::vector<RationalPolynomial>& basis,
               const SosOptions& opt) {
  SosResult r = sos_decide(w, std::vector<WeightedBlock>{{RationalPolynomial::constant(w.vars(), Rational(1)), basis}}, opt);
  rep.note = r.note;
  switch (r.verdict) {
    case SosVerdict::NotSos:
      rep.verdict = ObstructionVerdict::Obstructed;
      rep.witness = std::move(r.witness);
      break;
    case SosVerdict::Sos:
      rep.verdict = ObstructionVerdict::NotObstructed;
      rep.reason = "sos";
      rep.certificate = std::move(r.certificate);
      break;
    case SosVerdict::Inconclusive:
      rep.verdict = ObstructionVerdict::Inconclusive;
      rep.reason = "solver";
      break;
  }
}

std::string join_vars(const std::vector<std::string>& vars) {
  std::string s;
  for (std::size_t i = 0; i < vars.size(); ++i) s += (i ? "," : "") + vars[i];
  return s;
}

}  // namespace

ObstructionReport local_obstruction(const RationalPolynomial& f, const std::vector<Rational>& xi, const SosOptions& opt) {
  if (xi.size() != f.num_vars()) throw std::invalid_argument("local_obstruction: point has the wrong dimension");
  ObstructionReport rep;
  std::ostringstream site;
  site << "point (";
  for (std::size_t i = 0; i < xi.size(); ++i) site << (i ? ", " : "") << to_string(xi[i]);
  site << ")";
  rep.site = site.str();
  {
    std::string ring = "R[[";
    for (std::size_t i = 0; i < xi.size(); ++i) {
      ring += (i ? ", " : "") + f.vars()[i];
      if (xi[i] > 0) ring += " - " + to_string(xi[i]);
      if (xi[i] < 0) ring += " + " + to_string(Rational(-xi[i]));
    }
    rep.ring = ring + "]]";
  }
  const RationalPolynomial g = shift(f, xi);
  if (g.is_zero()) {
    rep.verdict = ObstructionVerdict::NotObstructed;
    rep.reason = "zero";
    rep.reduced = g;
    return rep;
  }
  const RationalPolynomial w = lowest_form(g);
  rep.reduced = w;
  if (w.degree() == 0) {
    const Rational c = w.constant_term();
    if (c > 0) {
      rep.verdict = ObstructionVerdict::NotObstructed;
      rep.reason = "positive_value";
      return rep;
    }
    rep.reason = "negative_value";
    apply_sos(rep, w, monomials_of_degree(w.vars(), 0, 0), opt);
    return rep;
  }
  if (w.degree() % 2 != 0) {
    // A nonzero odd form changes sign, so it is never a sum of squares.
    rep.verdict = ObstructionVerdict::Obstructed;
    rep.reason = "odd_lowest_form";
    return rep;
  }
  rep.reason = "non_sos_lowest_form";
  apply_sos(rep, w, monomials_of_degree(w.vars(), w.degree() / 2, w.degree() / 2), opt);
  return rep;
}

RationalPolynomial infinitesimal_reduction(const RationalPolynomial& F, const std::string& x0_in,
                                           const std::vector<Rational>& eta_in, const Rational& trunc_order) {
  if (F.num_vars() == 0) throw std::invalid_argument("infinitesimal_reduction: form has no variables");
  if (!F.is_homogeneous()) throw std::invalid_argument("infinitesimal_reduction: input must be a form");
  const std::string x0 = x0_in.empty() ? F.vars().front() : x0_in;
  const std::size_t k = F.var_index(x0);
  std::vector<std::string> xs;
  for (std::size_t i = 0; i < F.num_vars(); ++i)
    if (i != k) xs.push_back(F.vars()[i]);
  const std::vector<Rational> eta = eta_in.empty() ? std::vector<Rational>(xs.size(), Rational(0)) : eta_in;
  if (eta.size() != xs.size()) throw std::invalid_argument("infinitesimal_reduction: point has the wrong dimension");
  const int d = F.is_zero() ? 0 : F.degree();
  const PuiseuxScalar eps = PuiseuxScalar::epsilon(Rational(1), trunc_order);

  // g(x0, x) = F(x0, x - eta), then x0 -> eps, x -> eta + eps x.
  std::map<std::string, RationalPolynomial> back;
  back.emplace(x0, RationalPolynomial::variable(F.vars(), x0));
  for (std::size_t i = 0; i < xs.size(); ++i)
    back.emplace(xs[i], RationalPolynomial::variable(F.vars(), xs[i]) - RationalPolynomial::constant(F.vars(), eta[i]));
  const RationalPolynomial g = substitute(F, back);
  std::map<std::string, PuiseuxPolynomial> assignment;
  assignment.emplace(x0, PuiseuxPolynomial::constant(xs, eps));
  for (std::size_t i = 0; i < xs.size(); ++i)
    assignment.emplace(xs[i], PuiseuxPolynomial::variable(xs, xs[i]) * eps +
                                  PuiseuxPolynomial::constant(xs, PuiseuxScalar(eta[i])));
  const PuiseuxPolynomial ge = substitute(promote(g), assignment, xs);
  return residue(divide_eps_power(ge, Rational(d)));
}

ObstructionReport infinitesimal_obstruction(const RationalPolynomial& F, const std::string& x0_in,
                                            const std::vector<Rational>& eta, const SosOptions& opt,
                                            const Rational& trunc_order) {
  if (!F.is_homogeneous() || F.is_zero()) throw std::invalid_argument("infinitesimal_obstruction: input must be a nonzero form");
  const int d = F.degree();
  if (d % 2 != 0) throw std::invalid_argument("infinitesimal_obstruction: degree must be even");
  ObstructionReport rep;
  rep.reduced = infinitesimal_reduction(F, x0_in, eta, trunc_order);
  const auto& xs = rep.reduced.vars();
  rep.site = "infinitesimal";
  if (!eta.empty()) {
    rep.site += " at (";
    for (std::size_t i = 0; i < eta.size(); ++i) rep.site += (i ? ", " : "") + to_string(eta[i]);
    rep.site += ")";
  }
  rep.ring = "B[" + join_vars(xs) + "]/<" + join_vars(xs) + ">^" + std::to_string(d + 1);
  rep.reason = "non_sos_dehomogenization";
  apply_sos(rep, rep.reduced, monomials_of_degree(xs, 0, d / 2), opt);
  return rep;
}

}  // namespace shadowlab
