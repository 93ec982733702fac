#include "shadowlab/catalog.hpp"

#include <map>
#include <random>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

RationalPolynomial term(const std::vector<std::string>& vars, std::vector<int> e, int c) {
  return RationalPolynomial::monomial(vars, Monomial(std::move(e)), Rational(c));
}

}  // namespace

std::vector<std::string> catalog_names() { return {"motzkin", "choi-lam"}; }

NamedForm catalog(const std::string& name) {
  NamedForm f;
  f.name = name;
  if (name == "motzkin") {
    f.vars = {"x0", "x1", "x2"};
    f.polynomial = term(f.vars, {0, 6, 0}, 1) + term(f.vars, {4, 0, 2}, 1) + term(f.vars, {2, 0, 4}, 1) +
                   term(f.vars, {2, 2, 2}, -3);
    f.note = "ternary sextic, psd and not a sum of squares";
  } else if (name == "choi-lam") {
    f.vars = {"x1", "x2", "x3", "x4"};
    f.polynomial = term(f.vars, {2, 2, 0, 0}, 1) + term(f.vars, {0, 2, 2, 0}, 1) + term(f.vars, {2, 0, 2, 0}, 1) +
                   term(f.vars, {0, 0, 0, 4}, 1) + term(f.vars, {1, 1, 1, 1}, -4);
    f.note = "quaternary quartic, psd and not a sum of squares";
  } else {
    std::string names;
    for (const auto& n : catalog_names()) names += (names.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown form '" + name + "'; available: " + names);
  }
  f.degree = f.polynomial.degree();
  return f;
}

VeroneseSpec veronese_spec(int n, int d, bool homogeneous) {
  if (n < 1 || d < 1) throw std::invalid_argument("veronese: n and d must be positive");
  VeroneseSpec s;
  s.n = n;
  s.d = d;
  s.homogeneous = homogeneous;
  s.monomials = monomials_up_to(n, homogeneous ? d : 1, d);
  return s;
}

VectorXd veronese(int n, int d, const std::vector<double>& xi, bool homogeneous) {
  if (static_cast<int>(xi.size()) != n) throw std::invalid_argument("veronese: point has the wrong dimension");
  const VeroneseSpec s = veronese_spec(n, d, homogeneous);
  VectorXd v(s.N());
  for (int k = 0; k < s.N(); ++k) {
    double p = 1.0;
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < s.monomials[k][i]; ++e) p *= xi[i];
    v(k) = p;
  }
  return v;
}

std::vector<Rational> veronese(int n, int d, const std::vector<Rational>& xi, bool homogeneous) {
  if (static_cast<int>(xi.size()) != n) throw std::invalid_argument("veronese: point has the wrong dimension");
  const VeroneseSpec s = veronese_spec(n, d, homogeneous);
  std::vector<Rational> v;
  for (const auto& m : s.monomials) {
    Rational p = 1;
    for (int i = 0; i < n; ++i)
      for (int e = 0; e < m[i]; ++e) p *= xi[i];
    v.push_back(p);
  }
  return v;
}

Subspace L14(std::vector<std::string> vars) {
  if (vars.size() != 2) throw std::invalid_argument("L14 lives in two variables");
  std::vector<Monomial> ms;
  for (int i = 1; i <= 6; ++i) ms.push_back(Monomial{i, 0});
  for (int i = 1; i <= 4; ++i) ms.push_back(Monomial{0, i});
  for (int i = 1; i <= 2; ++i)
    for (int j = 1; j <= 2; ++j) ms.push_back(Monomial{i, j});
  std::sort(ms.begin(), ms.end(), GradedLexLess{});
  return Subspace::from_monomials(std::move(vars), ms);
}

PuiseuxPolynomial eps_shift(const RationalPolynomial& F, const std::vector<Rational>& xi, const Rational& order) {
  if (F.num_vars() < 1 || xi.size() + 1 != F.num_vars()) throw std::invalid_argument("eps_shift: point has the wrong dimension");
  if (order <= 0) throw std::invalid_argument("eps_shift: eps needs positive order");
  std::vector<std::string> xs(F.vars().begin() + 1, F.vars().end());
  std::map<std::string, PuiseuxPolynomial> a;
  a.emplace(F.vars()[0], PuiseuxPolynomial::constant(xs, PuiseuxScalar::epsilon(order)));
  for (std::size_t i = 0; i < xs.size(); ++i)
    a.emplace(xs[i], PuiseuxPolynomial::variable(xs, xs[i]) - PuiseuxPolynomial::constant(xs, PuiseuxScalar(xi[i])));
  return substitute(promote(F), a, xs).without_constant();
}

PsdSosReport psd_vs_sos_demo(int n, int two_d, const SosOptions& opt) {
  if (n < 1 || two_d < 2 || two_d % 2 != 0) throw std::invalid_argument("psd_vs_sos_demo: need n >= 1 and even 2d >= 2");
  PsdSosReport r;
  r.n = n;
  r.two_d = two_d;
  const int d = two_d / 2;
  if (two_d == 2 || n <= 2 || (n == 3 && two_d == 4)) {
    r.note = "no separation expected: every psd form is a sum of squares here";
    return r;
  }
  std::string name;
  if (n == 3 && two_d == 6) name = "motzkin";
  if (n == 4 && two_d == 4) name = "choi-lam";
  if (name.empty()) throw std::invalid_argument("psd_vs_sos_demo: unsupported (n, 2d); catalog covers (3,6) and (4,4)");
  r.separation_expected = true;
  r.form = name;
  const NamedForm f = catalog(name);
  const auto half = monomials_up_to(n, d, d);
  const auto full = monomials_up_to(n, two_d, two_d);
  r.moment_matrix_size = static_cast<int>(half.size());
  r.moment_coordinates = static_cast<int>(full.size());

  std::vector<RationalPolynomial> basis;
  for (const auto& m : half) basis.push_back(RationalPolynomial::monomial(f.vars, m, Rational(1)));
  SosResult res = sos_decide(f.polynomial, Subspace(f.vars, basis), opt);
  r.verdict = res.verdict;
  r.note = res.note;
  if (!res.witness) return r;
  r.witness = res.witness;

  // Dual SOS cone as a spectrahedral cone: lambda -> (lambda(m_a m_b))_ab >= 0.
  std::map<Monomial, int, GradedLexLess> index;
  for (std::size_t k = 0; k < full.size(); ++k) index.emplace(full[k], static_cast<int>(k));
  const int s = r.moment_matrix_size;
  std::vector<MatrixXd> B(full.size(), MatrixXd::Zero(s, s));
  for (int a = 0; a < s; ++a)
    for (int b = 0; b < s; ++b) B[index.at(half[a] * half[b])](a, b) = 1.0;
  VectorXd lam(static_cast<Eigen::Index>(full.size()));
  for (std::size_t k = 0; k < full.size(); ++k) {
    auto it = std::find(res.witness->monomials.begin(), res.witness->monomials.end(), full[k]);
    lam(static_cast<Eigen::Index>(k)) = it == res.witness->monomials.end() ? 0.0 : res.witness->lambda(it - res.witness->monomials.begin());
  }
  r.dual_membership = shadow_contains(Shadow(conic_pencil(std::move(B))), lam).verdict;
  return r;
}

std::string to_string(PipelineMode m) { return m == PipelineMode::Local ? "local" : "infinitesimal"; }

BasicClosedSet unit_ball(int n) {
  auto vars = default_vars(n);
  RationalPolynomial h = RationalPolynomial::constant(vars, Rational(1));
  for (const auto& v : vars) h -= RationalPolynomial::variable(vars, v).pow(2);
  return make_set(vars, {h}, 1.0);
}

BasicClosedSet unit_cube(int n) {
  auto vars = default_vars(n);
  std::vector<RationalPolynomial> h;
  const auto one = RationalPolynomial::constant(vars, Rational(1));
  for (const auto& v : vars) {
    const auto x = RationalPolynomial::variable(vars, v);
    h.push_back(x * (one - x));
  }
  BasicClosedSet s = make_set(vars, h, 1.0);
  s.box_lo.assign(vars.size(), 0.0);
  return s;
}

PipelineReport counterexample_pipeline(const std::string& form, const BasicClosedSet& S, PipelineMode mode,
                                       const PipelineOptions& opt) {
  S.check();
  const NamedForm f = catalog(form);
  PipelineReport rep;
  rep.form = form;
  rep.mode = mode;
  const int nv = static_cast<int>(f.vars.size());
  const int need = mode == PipelineMode::Local ? nv : nv - 1;
  if (S.ambient() != need)
    throw std::invalid_argument("counterexample_pipeline: the set must live in dimension " + std::to_string(need));
  std::vector<std::string> xs(f.vars.begin() + (mode == PipelineMode::Local ? 0 : 1), f.vars.end());

  Subspace L;
  if (mode == PipelineMode::Infinitesimal && form == "motzkin") {
    L = L14(xs);
    rep.L_name = "L14";
  } else {
    L = monomial_subspace(need, f.degree, false, xs);
    rep.L_name = "monomial_subspace(" + std::to_string(need) + "," + std::to_string(f.degree) + ")";
  }
  rep.L_dim = L.dim();

  std::mt19937_64 rng(opt.seed);
  {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int trials = 2000;
    int inside = 0;
    for (int t = 0; t < trials; ++t) {
      std::vector<double> x(S.vars.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = S.box_lo[i] + (S.box_hi[i] - S.box_lo[i]) * unit(rng);
      if (S.contains(x)) ++inside;
    }
    rep.interior_fraction = static_cast<double>(inside) / trials;
    if (inside == 0) throw std::invalid_argument("counterexample_pipeline: sampling found no interior points of S");
  }

  for (const auto& x : S.sample(opt.points, rng)) {
    std::vector<Rational> eta;
    std::vector<double> xd;
    for (double v : x) eta.push_back(approximate_rational(v, 1000));
    for (const auto& q : eta) xd.push_back(to_double(q));
    if (!S.contains(xd)) {
      eta.clear();
      for (double v : x) eta.push_back(exact_rational(v));
      xd = x;
    }
    PipelineEntry e;
    e.point = xd;
    ObstructionReport o;
    if (mode == PipelineMode::Local) {
      std::vector<Rational> neg;
      for (const auto& q : eta) neg.push_back(-q);
      const RationalPolynomial g = shift(f.polynomial, neg);
      e.in_L = L.contains(g.without_constant());
      o = local_obstruction(g, eta, opt.sos);
    } else {
      e.in_L = L.contains(eps_shift(f.polynomial, eta, Rational(1)));
      o = infinitesimal_obstruction(f.polynomial, f.vars.front(), eta, opt.sos);
    }
    e.verdict = o.verdict;
    e.reason = o.reason;
    e.ring = o.ring;
    if (o.witness) {
      e.witness_value = o.witness->value;
      e.witness_min_eig = o.witness->min_eig;
    }
    if (e.verdict == ObstructionVerdict::Obstructed) ++rep.obstructed;
    if (e.verdict == ObstructionVerdict::Inconclusive) ++rep.inconclusive;
    rep.entries.push_back(std::move(e));
  }
  rep.note = "pointwise obstruction verified at " + std::to_string(rep.obstructed) + " of " +
             std::to_string(rep.entries.size()) +
             " sampled points; that the set is not a spectrahedral shadow needs the obstruction at every point of "
             "the set and is a theorem, not a result of this computation";
  return rep;
}

}  // namespace shadowlab
