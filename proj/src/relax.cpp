#include "shadowlab/relax.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool BasicClosedSet::contains(const std::vector<double>& x, double tol) const {
  for (const auto& g : h)
    if (evaluate(g, x) < -tol) return false;
  return true;
}

void BasicClosedSet::check() const {
  for (const auto& g : h)
    if (g.vars() != vars) throw std::invalid_argument("basic closed set: generator uses a different variable list");
  if (box_lo.size() != vars.size() || box_hi.size() != vars.size())
    throw std::invalid_argument("basic closed set: sampling box has the wrong dimension");
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (!(box_lo[i] <= box_hi[i])) throw std::invalid_argument("basic closed set: empty sampling box");
}

std::vector<std::vector<double>> BasicClosedSet::sample(int count, std::mt19937_64& rng, int max_tries_factor) const {
  std::vector<std::vector<double>> out;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const long long max_tries = static_cast<long long>(std::max(count, 1)) * max_tries_factor;
  for (long long t = 0; t < max_tries && static_cast<int>(out.size()) < count; ++t) {
    std::vector<double> x(vars.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = box_lo[i] + (box_hi[i] - box_lo[i]) * unit(rng);
    if (contains(x)) out.push_back(std::move(x));
  }
  return out;
}

BasicClosedSet make_set(std::vector<std::string> vars, std::vector<RationalPolynomial> h, double box) {
  BasicClosedSet s;
  s.box_lo.assign(vars.size(), -box);
  s.box_hi.assign(vars.size(), box);
  s.vars = std::move(vars);
  s.h = std::move(h);
  s.check();
  return s;
}

VectorXd MomentShadow::extension(int system, const VectorXd& lambda, const VectorXd& eta) const {
  const auto& s = systems.at(static_cast<std::size_t>(system));
  VectorXd out = to_double(s.offset).col(0) + to_double(s.lin) * lambda;
  if (s.free.cols() > 0) out += to_double(s.free) * eta.segment(s.eta_begin, s.free.cols());
  return out;
}

namespace {

struct SystemSpec {
  std::vector<std::string> vars;
  std::vector<RationalPolynomial> targets;  // targets[0] -> 1, targets[k] -> lambda_k
  std::vector<WeightedBlock> blocks;
};

RationalVector coeff_row(const RationalPolynomial& q, const std::map<Monomial, Eigen::Index, GradedLexLess>& index,
                         Eigen::Index N) {
  RationalVector v = RationalVector::Constant(N, Rational(0));
  for (const auto& [m, c] : q.terms()) v(index.at(m)) = c;
  return v;
}

MomentShadow assemble(const Subspace& L, const std::vector<SystemSpec>& specs) {
  const Eigen::Index n = L.dim();
  MomentShadow out;
  out.L = L;
  std::vector<MatrixXd> blockA;
  std::vector<std::vector<MatrixXd>> blockB;
  std::vector<std::vector<std::pair<int, MatrixXd>>> blockC;  // (global eta index, matrix)
  std::vector<RationalVector> equalities;                     // r . (1, lambda) = 0
  int eta_total = 0;

  for (const auto& sp : specs) {
    std::set<Monomial, GradedLexLess> mons;
    for (const auto& t : sp.targets)
      for (const auto& [m, c] : t.terms()) mons.insert(m);
    std::vector<std::vector<std::vector<RationalPolynomial>>> products;
    for (const auto& blk : sp.blocks) {
      const std::size_t s = blk.basis.size();
      std::vector<std::vector<RationalPolynomial>> P(s, std::vector<RationalPolynomial>(s, RationalPolynomial(sp.vars)));
      for (std::size_t a = 0; a < s; ++a)
        for (std::size_t b = a; b < s; ++b) {
          P[a][b] = blk.weight * blk.basis[a] * blk.basis[b];
          for (const auto& [m, c] : P[a][b].terms()) mons.insert(m);
        }
      products.push_back(std::move(P));
    }
    MomentShadow::System sys;
    sys.vars = sp.vars;
    sys.monomials.assign(mons.begin(), mons.end());
    const Eigen::Index N = static_cast<Eigen::Index>(sys.monomials.size());
    std::map<Monomial, Eigen::Index, GradedLexLess> index;
    for (Eigen::Index i = 0; i < N; ++i) index.emplace(sys.monomials[i], i);

    RationalMatrix aug = RationalMatrix::Constant(n + 1, N + n + 1, Rational(0));
    for (Eigen::Index k = 0; k <= n; ++k) {
      aug.row(k).head(N) = coeff_row(sp.targets[k], index, N).transpose();
      aug(k, N + k) = 1;
    }
    RowEchelon e = row_reduce(aug);
    std::vector<bool> is_pivot(N, false);
    for (int p : e.pivots)
      if (p < N) is_pivot[p] = true;
    std::vector<Eigen::Index> free_cols;
    for (Eigen::Index j = 0; j < N; ++j)
      if (!is_pivot[j]) free_cols.push_back(j);
    const Eigen::Index m = static_cast<Eigen::Index>(free_cols.size());
    sys.offset = RationalMatrix::Constant(N, 1, Rational(0));
    sys.lin = RationalMatrix::Constant(N, n, Rational(0));
    sys.free = RationalMatrix::Constant(N, m, Rational(0));
    for (Eigen::Index f = 0; f < m; ++f) sys.free(free_cols[f], f) = 1;
    for (std::size_t r = 0; r < e.pivots.size(); ++r) {
      const int p = e.pivots[r];
      const auto row = e.reduced.row(static_cast<Eigen::Index>(r));
      if (p >= N) {
        equalities.push_back(row.tail(n + 1).transpose());
        continue;
      }
      sys.offset(p, 0) = row(N);
      for (Eigen::Index k = 0; k < n; ++k) sys.lin(p, k) = row(N + 1 + k);
      for (Eigen::Index f = 0; f < m; ++f) sys.free(p, f) = -row(free_cols[f]);
    }
    sys.eta_begin = eta_total;
    const MatrixXd off = to_double(sys.offset), lin = to_double(sys.lin), fr = to_double(sys.free);

    for (std::size_t b = 0; b < sp.blocks.size(); ++b) {
      const Eigen::Index s = static_cast<Eigen::Index>(sp.blocks[b].basis.size());
      MatrixXd A0 = MatrixXd::Zero(s, s);
      std::vector<MatrixXd> Bk(n, MatrixXd::Zero(s, s));
      std::vector<MatrixXd> Cj(m, MatrixXd::Zero(s, s));
      for (Eigen::Index a = 0; a < s; ++a)
        for (Eigen::Index c = a; c < s; ++c) {
          const VectorXd v = to_double(RationalMatrix(coeff_row(products[b][a][c], index, N))).col(0);
          const double a0 = v.dot(off.col(0));
          A0(a, c) = A0(c, a) = a0;
          for (Eigen::Index k = 0; k < n; ++k) Bk[k](a, c) = Bk[k](c, a) = v.dot(lin.col(k));
          for (Eigen::Index j = 0; j < m; ++j) Cj[j](a, c) = Cj[j](c, a) = v.dot(fr.col(j));
        }
      blockA.push_back(std::move(A0));
      blockB.push_back(std::move(Bk));
      std::vector<std::pair<int, MatrixXd>> cs;
      for (Eigen::Index j = 0; j < m; ++j) cs.emplace_back(eta_total + static_cast<int>(j), std::move(Cj[j]));
      blockC.push_back(std::move(cs));
    }
    eta_total += static_cast<int>(m);
    out.systems.push_back(std::move(sys));
  }

  // Equalities on lambda become pairs of 1x1 blocks g >= 0, -g >= 0.
  for (const auto& r : equalities) {
    for (int sign : {1, -1}) {
      MatrixXd A0(1, 1);
      A0(0, 0) = sign * to_double(r(0));
      std::vector<MatrixXd> Bk;
      for (Eigen::Index k = 0; k < n; ++k) Bk.push_back(MatrixXd::Constant(1, 1, sign * to_double(r(1 + k))));
      blockA.push_back(A0);
      blockB.push_back(std::move(Bk));
      blockC.emplace_back();
    }
  }

  Eigen::Index D = 0;
  for (const auto& a : blockA) D += a.rows();
  if (D == 0) throw std::invalid_argument("moment shadow: no localizing blocks");
  Pencil p;
  p.A = MatrixXd::Zero(D, D);
  p.B.assign(n, MatrixXd::Zero(D, D));
  p.C.assign(eta_total, MatrixXd::Zero(D, D));
  Eigen::Index at = 0;
  for (std::size_t b = 0; b < blockA.size(); ++b) {
    const Eigen::Index s = blockA[b].rows();
    p.A.block(at, at, s, s) = blockA[b];
    for (Eigen::Index k = 0; k < n; ++k) p.B[k].block(at, at, s, s) = blockB[b][k];
    for (const auto& [j, M] : blockC[b]) p.C[j].block(at, at, s, s) = M;
    at += s;
  }
  out.shadow = Shadow(std::move(p));
  return out;
}

}  // namespace

MomentShadow build_K_prime(const BasicClosedSet& S, const RelaxationSpec& spec) {
  S.check();
  if (spec.L.vars() != S.vars) throw std::invalid_argument("build_K_prime: L uses a different variable list");
  if (spec.L.contains_one()) throw std::invalid_argument("build_K_prime: L must not contain the constants");
  if (spec.W.size() != S.h.size() + 1)
    throw std::invalid_argument("build_K_prime: need one weight space per generator plus W_0");
  SystemSpec sp;
  sp.vars = S.vars;
  const auto one = RationalPolynomial::constant(S.vars, Rational(1));
  sp.targets.push_back(one);
  for (const auto& l : spec.L.basis()) sp.targets.push_back(l);
  for (std::size_t i = 0; i < spec.W.size(); ++i) {
    if (spec.W[i].vars() != S.vars) throw std::invalid_argument("build_K_prime: W_" + std::to_string(i) + " uses a different variable list");
    if (spec.W[i].dim() == 0) continue;
    sp.blocks.push_back({i == 0 ? one : S.h[i - 1], spec.W[i].basis()});
  }
  if (sp.blocks.empty()) throw std::invalid_argument("build_K_prime: all weight spaces are zero");
  return assemble(spec.L, {sp});
}

MembershipResult k_prime_test(const MomentShadow& K, const VectorXd& lambda, const ShadowOptions& opt) {
  if (lambda.size() != K.dim()) throw std::invalid_argument("k_prime_member: functional has wrong length");
  return shadow_contains(K.shadow, lambda, opt);
}

Membership k_prime_member(const MomentShadow& K, const VectorXd& lambda, const ShadowOptions& opt) {
  return k_prime_test(K, lambda, opt).verdict;
}

VectorXd evaluation_functional(const Subspace& L, const std::vector<double>& x) {
  VectorXd v(L.dim());
  for (int k = 0; k < L.dim(); ++k) v(k) = evaluate(L.basis()[k], x);
  return v;
}

ProbeReport exactness_probe(const BasicClosedSet& S, const RelaxationSpec& spec, int budget, std::uint64_t seed,
                            int samples, const ShadowOptions& opt) {
  return exactness_probe(S, build_K_prime(S, spec), budget, seed, samples, opt);
}

ProbeReport exactness_probe(const BasicClosedSet& S, const MomentShadow& K, int budget, std::uint64_t seed, int samples,
                            const ShadowOptions& opt) {
  ProbeReport rep;
  if (budget <= 0) return rep;
  std::mt19937_64 rng(seed);
  const auto pts = S.sample(samples, rng);
  rep.samples = static_cast<int>(pts.size());
  std::vector<VectorXd> phis;
  for (const auto& x : pts) phis.push_back(evaluation_functional(K.L, x));
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Unit monomials of the first system, for reading a point off Lambda.
  std::vector<Eigen::Index> unit_index;
  if (!K.systems.empty() && K.systems[0].vars == S.vars) {
    const auto& mons = K.systems[0].monomials;
    for (int i = 0; i < S.ambient(); ++i) {
      auto it = std::find(mons.begin(), mons.end(), Monomial::unit(S.vars.size(), i));
      if (it == mons.end()) {
        unit_index.clear();
        break;
      }
      unit_index.push_back(it - mons.begin());
    }
  }

  for (int t = 0; t < budget; ++t) {
    VectorXd c(K.dim());
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
    c.normalize();
    ProbeEntry e;
    e.direction = c;
    const SupportResult sup = support(K.shadow, c, opt);
    e.status = sup.status;
    double best = -std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < phis.size(); ++i) {
      const double v = c.dot(phis[i]);
      if (v > best) {
        best = v;
        best_i = i;
      }
    }
    if (sup.status == SdpStatus::Optimal && !unit_index.empty() && !pts.empty()) {
      const VectorXd Lam = K.extension(0, sup.xi, sup.eta);
      std::vector<double> x(S.vars.size());
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = Lam(unit_index[i]);
      if (!S.contains(x)) {
        // Pull back into S along the segment from the best sample.
        const auto& y = pts[best_i];
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          std::vector<double> z(x.size());
          for (std::size_t i = 0; i < z.size(); ++i) z[i] = y[i] + mid * (x[i] - y[i]);
          (S.contains(z) ? lo : hi) = mid;
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] + lo * (x[i] - y[i]);
      }
      best = std::max(best, c.dot(evaluation_functional(K.L, x)));
    }
    e.sample_value = best;
    if (sup.status == SdpStatus::Optimal) {
      e.relaxation_value = sup.value;
      e.gap = std::max(0.0, sup.value - best);
      if (rep.worst_direction.size() == 0 || e.gap > rep.max_gap) {
        rep.max_gap = e.gap;
        rep.worst_direction = c;
      }
    } else {
      ++rep.failures;
    }
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

PullbackMap plain_map(std::vector<RationalPolynomial> phi, const Subspace& U) {
  if (phi.empty()) throw std::invalid_argument("plain_map: empty map");
  return PullbackMap{std::move(phi), {{RationalPolynomial::constant(U.vars(), Rational(1)), U.basis()}}};
}

MomentShadow umker_shadow(const Subspace& L, const std::vector<PullbackMap>& maps) {
  if (L.contains_one()) throw std::invalid_argument("umker_shadow: L must not contain the constants");
  if (maps.empty()) throw std::invalid_argument("umker_shadow: need at least one map");
  std::vector<SystemSpec> specs;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const auto& mp = maps[i];
    if (mp.phi.size() != L.vars().size())
      throw std::invalid_argument("umker_shadow: map " + std::to_string(i) + " has the wrong number of coordinates");
    if (mp.blocks.empty()) throw std::invalid_argument("umker_shadow: map " + std::to_string(i) + " has no blocks");
    SystemSpec sp;
    sp.vars = mp.phi.front().vars();
    sp.blocks = mp.blocks;
    sp.targets.push_back(RationalPolynomial::constant(sp.vars, Rational(1)));
    for (const auto& l : L.basis()) sp.targets.push_back(pullback(l, mp.phi));
    // phi^*(L_1) must lie in the span of the block products.
    std::vector<RationalPolynomial> prods;
    for (const auto& blk : sp.blocks)
      for (std::size_t a = 0; a < blk.basis.size(); ++a)
        for (std::size_t b = a; b < blk.basis.size(); ++b) prods.push_back(blk.weight * blk.basis[a] * blk.basis[b]);
    const Subspace span = Subspace::span(sp.vars, prods);
    for (std::size_t k = 0; k < sp.targets.size(); ++k) {
      if (!span.contains(sp.targets[k])) {
        const std::string name = k == 0 ? std::string("1") : to_string(L.basis()[k - 1]);
        throw std::invalid_argument("umker_shadow: map " + std::to_string(i) + " sends " + name + " to " +
                                    to_string(sp.targets[k]) + ", outside the span of U U");
      }
    }
    specs.push_back(std::move(sp));
  }
  return assemble(L, specs);
}

namespace {

std::optional<RationalVector> rational_direction(const VectorXd& c, const VectorXd& lambda,
                                                 const std::vector<VectorXd>& phis, Rational& offset) {
  for (std::int64_t D : {1, 2, 3, 4, 8, 16, 32, 64, 128, 1024, 1000000}) {
    RationalVector cr(c.size());
    bool nonzero = false;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      cr(i) = approximate_rational(c(i), D);
      if (cr(i) != 0) nonzero = true;
    }
    if (!nonzero) continue;
    const VectorXd cd = to_double(RationalMatrix(cr)).col(0);
    double M = -std::numeric_limits<double>::infinity();
    for (const auto& p : phis) M = std::max(M, cd.dot(p));
    const double at = cd.dot(lambda);
    if (!(at > M)) continue;
    for (std::int64_t D2 : {1, 2, 3, 4, 8, 16, 32, 64, 128, 1024, 1000000}) {
      Rational m = approximate_rational(M, D2);
      if (to_double(m) >= M && at > to_double(m)) {
        offset = m;
        return cr;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

HullCheck hull_certificate_check(const VectorXd& lambda, const BasicClosedSet& S, const Subspace& L, int budget,
                                 std::uint64_t seed, int samples, const SosOptions& sos) {
  S.check();
  if (L.vars() != S.vars) throw std::invalid_argument("hull_certificate_check: L uses a different variable list");
  if (lambda.size() != L.dim()) throw std::invalid_argument("hull_certificate_check: functional has wrong length");
  HullCheck out;
  if (budget <= 0) return out;
  std::mt19937_64 rng(seed);
  const auto build = S.sample(samples, rng);
  const auto check = S.sample(samples, rng);
  if (build.empty()) return out;
  std::vector<VectorXd> phis, checks;
  for (const auto& x : build) phis.push_back(evaluation_functional(L, x));
  for (const auto& x : check) checks.push_back(evaluation_functional(L, x));
  VectorXd mean = VectorXd::Zero(L.dim());
  for (const auto& p : phis) mean += p;
  mean /= static_cast<double>(phis.size());
  std::normal_distribution<double> gauss(0.0, 1.0);

  double best_sep = 0.0;
  for (int t = 0; t < budget; ++t) {
    VectorXd c(L.dim());
    if (t == 0) {
      c = lambda - mean;
    } else {
      for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = gauss(rng);
    }
    if (c.cwiseAbs().maxCoeff() == 0.0) continue;
    c /= c.cwiseAbs().maxCoeff();
    ++out.directions;
    Rational m;
    auto cr = rational_direction(c, lambda, phis, m);
    if (!cr) continue;
    RationalPolynomial g = RationalPolynomial::constant(S.vars, m);
    for (int k = 0; k < L.dim(); ++k) g -= L.basis()[k] * (*cr)(k);
    const VectorXd cd = to_double(RationalMatrix(*cr)).col(0);
    const double value = to_double(m) - cd.dot(lambda);
    const double sep = -value / cd.norm();
    double mn = std::numeric_limits<double>::infinity();
    for (const auto& x : check) mn = std::min(mn, evaluate(g, x));
    if (mn < -1e-9 || sep <= best_sep) continue;
    best_sep = sep;
    out.found = true;
    out.g = g;
    out.value = value;
    out.min_sampled = mn;
  }
  if (!out.found) return out;

  // Try to certify g >= 0 on S with sigma_0 + sum h_i sigma_i.
  int top = out.g.degree();
  for (const auto& h : S.h) top = std::max(top, h.degree());
  const int d0 = (top + 1) / 2;
  std::vector<WeightedBlock> blocks;
  auto mons = [&](int d) {
    std::vector<RationalPolynomial> v;
    for (const auto& m : monomials_up_to(S.vars.size(), 0, d)) v.push_back(RationalPolynomial::monomial(S.vars, m, Rational(1)));
    return v;
  };
  blocks.push_back({RationalPolynomial::constant(S.vars, Rational(1)), mons(d0)});
  for (const auto& h : S.h) {
    const int di = d0 - (h.degree() + 1) / 2;
    if (di >= 0) blocks.push_back({h, mons(di)});
  }
  out.confidence = "sampled-only";
  try {
    SosResult r = sos_decide(out.g, blocks, sos);
    if (r.verdict == SosVerdict::Sos) {
      out.confidence = "certified";
      out.certificate = std::move(r.certificate);
    }
  } catch (const NotInSpanError&) {
  }
  return out;
}

}  // namespace shadowlab
