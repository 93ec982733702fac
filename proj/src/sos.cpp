#include "shadowlab/sos.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(SosVerdict v) {
  switch (v) {
    case SosVerdict::Sos: return "sos";
    case SosVerdict::NotSos: return "not_sos";
    case SosVerdict::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

constexpr double kBoundaryGap = 1e-11;

double monomial_value(const Monomial& m, const std::vector<double>& p) {
  double v = 1.0;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (int k = 0; k < m[i]; ++k) v *= p[i];
  return v;
}

Rational max_abs_coeff(const RationalPolynomial& f) {
  Rational s = 0;
  for (const auto& [m, c] : f.terms()) s = std::max(s, Rational(abs(c)));
  return s;
}

void fill_float_squares(SosCertificate& cert) {
  cert.float_squares.clear();
  for (std::size_t b = 0; b < cert.gram.size(); ++b) {
    if (cert.gram[b].rows() == 0) continue;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cert.gram[b]);
    for (Eigen::Index k = es.eigenvalues().size() - 1; k >= 0; --k) {
      const double ev = es.eigenvalues()(k);
      if (ev <= 0) break;
      cert.float_squares.push_back({static_cast<int>(b), std::sqrt(ev) * es.eigenvectors().col(k)});
    }
  }
}

double gram_residual(const GramSystem& sys, const VectorXd& g, const RationalVector& cf) {
  const VectorXd r = to_double(sys.K) * g - to_double(RationalMatrix(cf));
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

void attach_exact(SosCertificate& cert, ExactGram eg) {
  cert.squares.clear();
  for (const auto& sq : eg.squares) {
    const auto& blk = cert.system.blocks[sq.block];
    RationalPolynomial q(cert.system.vars);
    for (Eigen::Index i = 0; i < sq.vector.size(); ++i)
      if (sq.vector(i) != 0) q += blk.basis[i] * sq.vector(i);
    cert.squares.push_back({sq.weight, blk.weight, std::move(q)});
  }
  cert.exact = std::move(eg);
}

// Average of point evaluations (trace normalized), restricted to points
// where every weight is nonnegative.
std::optional<VectorXd> evaluation_center(const GramSystem& sys, std::uint64_t seed) {
  const std::size_t n = sys.vars.size();
  int want = 5;
  for (int s : sys.block_sizes()) want = std::max(want, 2 * s + 5);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXd acc = VectorXd::Zero(static_cast<Eigen::Index>(sys.monomials.size()));
  int got = 0;
  for (int tries = 0; tries < 50 * want && got < want; ++tries) {
    std::vector<double> p(n);
    for (auto& v : p) v = gauss(rng);
    bool ok = true;
    for (const auto& blk : sys.blocks)
      if (evaluate(blk.weight, p) < 0) ok = false;
    if (!ok) continue;
    VectorXd e(acc.size());
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = monomial_value(sys.monomials[i], p);
    double tr = 0;
    for (const auto& M : sys.moment_matrices(e)) tr += M.trace();
    if (!(tr > 0) || !std::isfinite(tr)) continue;
    acc += e / tr;
    ++got;
  }
  if (got == 0) return std::nullopt;
  return acc / got;
}

struct WitnessTry {
  VectorXd lambda;
  std::vector<MatrixXd> moments;
  double value;
  double min_eig;
};

WitnessTry evaluate_witness(const GramSystem& sys, const VectorXd& lambda, const VectorXd& cfd) {
  WitnessTry w{lambda, sys.moment_matrices(lambda), lambda.dot(cfd), 0.0};
  double tr = 0;
  for (const auto& M : w.moments) tr += M.trace();
  if (tr > 0) {
    w.lambda /= tr;
    for (auto& M : w.moments) M /= tr;
    w.value /= tr;
  }
  w.min_eig = std::numeric_limits<double>::infinity();
  for (const auto& M : w.moments)
    if (M.rows()) w.min_eig = std::min(w.min_eig, min_eig(M));
  return w;
}

}  // namespace

SosResult sos_decide(const RationalPolynomial& f, const std::vector<WeightedBlock>& blocks_in, const SosOptions& opt) {
  std::vector<WeightedBlock> blocks;
  for (const auto& b : blocks_in)
    if (!b.basis.empty() && !b.weight.is_zero()) blocks.push_back(b);
  SosResult res;
  if (blocks.empty()) {
    if (!f.is_zero()) throw NotInSpanError("sos_decide: empty basis cannot produce a nonzero polynomial");
    res.verdict = SosVerdict::Sos;
    res.status = SdpStatus::Optimal;
    SosCertificate cert;
    cert.system = build_gram_system(f.vars(), {});
    cert.exact = ExactGram{};
    cert.exact_verified = true;
    res.certificate = std::move(cert);
    return res;
  }
  GramSystem sys = build_gram_system(f.vars(), blocks);
  auto cf_opt = sys.coefficients(f);
  if (!cf_opt) throw NotInSpanError("sos_decide: f has a monomial outside the span of the basis products");
  const RationalVector cf = *cf_opt;
  const Rational smax = f.is_zero() ? Rational(1) : max_abs_coeff(f);
  const double sd = to_double(smax);
  const RationalVector cfs = cf / smax;

  const Eigen::Index nc = static_cast<Eigen::Index>(sys.coords.size());
  RationalMatrix aug(sys.K.rows(), nc + 1);
  aug.leftCols(nc) = sys.K;
  aug.col(nc) = cfs;
  RowEchelon e = row_reduce(aug);
  for (int p : e.pivots)
    if (p == nc) throw NotInSpanError("sos_decide: f is not in the span of the basis products");
  const RationalMatrix Ri = e.reduced.leftCols(nc);
  RationalVector g0r = RationalVector::Constant(nc, Rational(0));
  if (Ri.rows() > 0) {
    auto t = solve(RationalMatrix(Ri * Ri.transpose()), RationalVector(e.reduced.col(nc)));
    g0r = Ri.transpose() * *t;
  }
  const VectorXd g0 = to_double(RationalMatrix(g0r));
  const MatrixXd Nd = to_double(nullspace(sys.K));
  MatrixXd Q(nc, Nd.cols());
  if (Nd.cols() > 0) {
    Eigen::HouseholderQR<MatrixXd> qr(Nd);
    Q = qr.householderQ() * MatrixXd::Identity(nc, Nd.cols());
  }
  const int p = static_cast<int>(Q.cols());
  const std::vector<int> sizes = sys.block_sizes();
  const int nb = static_cast<int>(sizes.size());

  // max gamma : G0 + sum z_k E_k - gamma I >= 0, gamma <= 1.
  SdpProblem sdp;
  sdp.blocks = sizes;
  sdp.blocks.push_back(1);
  const auto G0 = sys.to_blocks(g0);
  for (int b = 0; b < nb; ++b) append_dense(sdp.C, b, G0[b]);
  sdp.C.push_back({nb, 0, 0, 1.0});
  for (int k = 0; k < p; ++k) {
    SparseSym a;
    const auto Ek = sys.to_blocks(VectorXd(-Q.col(k)));
    for (int b = 0; b < nb; ++b) append_dense(a, b, Ek[b], 1e-14);
    sdp.add_constraint(std::move(a), 0.0);
  }
  {
    SparseSym a;
    for (int b = 0; b < nb; ++b)
      for (int i = 0; i < sizes[b]; ++i) a.push_back({b, i, i, 1.0});
    a.push_back({nb, 0, 0, 1.0});
    sdp.add_constraint(std::move(a), 1.0);
  }
  const SdpSolution sol = solve_sdp(sdp, opt.sdp);
  res.status = sol.status;
  if (sol.status != SdpStatus::Optimal) {
    res.note = "solver: " + to_string(sol.status) + (sol.message.empty() ? "" : " (" + sol.message + ")");
    return res;
  }
  const double gamma = sol.y(p);
  res.gamma = gamma;
  const VectorXd z = sol.y.head(p);
  const VectorXd g = g0 + Q * z;  // Gram of f / smax

  auto make_cert = [&]() {
    SosCertificate cert;
    cert.system = sys;
    cert.gram = sys.to_blocks(VectorXd(g * sd));
    fill_float_squares(cert);
    cert.float_residual = gram_residual(sys, g * sd, cf);
    return cert;
  };

  if (gamma >= 0) {
    SosCertificate cert = make_cert();
    if (opt.rationalize)
      if (auto ex = rationalize(cert, f, opt.denominator_bounds)) cert = std::move(*ex);
    if (verify_certificate(cert, f)) {
      res.verdict = SosVerdict::Sos;
      res.note = cert.exact_verified ? "exact certificate" : "float certificate";
      res.certificate = std::move(cert);
    } else {
      res.note = "certificate failed re-verification";
    }
    return res;
  }

  if (gamma <= -opt.tol_sep) {
    // X lies in the range of K': w = K' lambda with w_ii = X_ii, w_ij = 2 X_ij.
    VectorXd w(nc);
    for (Eigen::Index c = 0; c < nc; ++c) {
      const auto& co = sys.coords[c];
      w(c) = (co.i == co.j ? 1.0 : 2.0) * sol.X[co.block](co.i, co.j);
    }
    const MatrixXd Kd = to_double(sys.K);
    const VectorXd lambda = Kd.transpose().colPivHouseholderQr().solve(w);
    const VectorXd cfd = to_double(RationalMatrix(cf));
    std::vector<WitnessTry> tries;
    if (auto center = evaluation_center(sys, opt.seed)) {
      const double v = lambda.dot(cfd);
      const double vc = center->dot(cfd);
      double delta = 0.1;
      if (vc > v) delta = std::min(delta, -v / (2.0 * (vc - v)));
      tries.push_back(evaluate_witness(sys, (1.0 - delta) * lambda + delta * *center, cfd));
    }
    tries.push_back(evaluate_witness(sys, lambda, cfd));
    for (auto& t : tries) {
      if (t.value <= -opt.tol_sep && t.min_eig >= -opt.tol_psd) {
        NotSosWitness wit{sys.monomials, t.lambda, t.moments, t.value, t.min_eig};
        WitnessCheck chk = check_witness(wit, sys.blocks, f, opt.tol_psd, opt.tol_sep);
        if (!chk.ok) continue;
        res.verdict = SosVerdict::NotSos;
        res.witness = std::move(wit);
        res.note = "dual witness";
        return res;
      }
    }
    res.note = "separating functional failed re-verification";
    return res;
  }

  // |gamma| below the separation tolerance: only an exact certificate decides.
  SosCertificate cert = make_cert();
  if (opt.rationalize) {
    if (auto ex = rationalize(cert, f, opt.denominator_bounds); ex && verify_certificate(*ex, f)) {
      res.verdict = SosVerdict::Sos;
      res.note = "exact certificate on the boundary";
      res.certificate = std::move(*ex);
      return res;
    }
  }
  // Boundary Gram matrices carry noise of order sqrt(gap): one tighter solve first.
  if (opt.rationalize && opt.sdp.tol_gap > kBoundaryGap) {
    SosOptions tight = opt;
    tight.sdp.tol_gap = kBoundaryGap;
    tight.sdp.tol_feas = std::min(opt.sdp.tol_feas, kBoundaryGap);
    SosResult r = sos_decide(f, blocks, tight);
    if (r.verdict == SosVerdict::Sos) return r;
  }
  // Retry on the face cut out by the numerical kernel of G. Only a certificate
  // counts there: the face is a guess, so its infeasibility proves nothing.
  if (opt.rationalize && opt.face_reductions > 0) {
    auto reduced = reduce_face(sys, cert.gram);
    if (reduced) {
      SosOptions sub = opt;
      --sub.face_reductions;
      try {
        SosResult r = sos_decide(f, *reduced, sub);
        if (r.verdict == SosVerdict::Sos) {
          r.gamma = gamma;
          r.note += " after face reduction";
          return r;
        }
      } catch (const NotInSpanError&) {
      }
    }
  }
  res.note = "boundary case: gamma within tolerance of zero, no exact certificate";
  return res;
}

SosResult sos_decide(const RationalPolynomial& f, const Subspace& U, const SosOptions& opt) {
  if (U.vars() != f.vars()) throw std::invalid_argument("sos_decide: basis and polynomial use different variables");
  return sos_decide(f, std::vector<WeightedBlock>{{RationalPolynomial::constant(f.vars(), Rational(1)), U.basis()}}, opt);
}

SosResult sos_decide(const RationalPolynomial& f, const SosOptions& opt) {
  const auto one = RationalPolynomial::constant(f.vars(), Rational(1));
  auto as_polys = [&](const std::vector<Monomial>& ms) {
    std::vector<RationalPolynomial> out;
    for (const auto& m : ms) out.push_back(RationalPolynomial::monomial(f.vars(), m, Rational(1)));
    return out;
  };
  const auto nb = newton_basis(f);
  if (!nb.empty()) {
    try {
      return sos_decide(f, std::vector<WeightedBlock>{{one, as_polys(nb)}}, opt);
    } catch (const NotInSpanError&) {
      // Newton pruning dropped a square with nonpositive coefficient; fall through.
    }
  }
  const int d = f.is_zero() ? 0 : f.degree() / 2;
  const int lo = f.is_homogeneous() && !f.is_zero() ? d : 0;
  return sos_decide(f, std::vector<WeightedBlock>{{one, as_polys(monomials_up_to(f.num_vars(), lo, d))}}, opt);
}

std::optional<SosCertificate> rationalize(const SosCertificate& cert, const RationalPolynomial& f,
                                          const std::vector<std::int64_t>& denominator_bounds) {
  auto cf = cert.system.coefficients(f);
  if (!cf) return std::nullopt;
  const Rational smax = f.is_zero() ? Rational(1) : max_abs_coeff(f);
  const double sd = to_double(smax);
  std::vector<MatrixXd> G;
  for (const auto& b : cert.gram) G.push_back(b / sd);
  auto eg = rationalize_gram(cert.system, RationalVector(*cf / smax), G, denominator_bounds);
  if (!eg) return std::nullopt;
  for (auto& b : eg->gram) b *= smax;
  for (auto& s : eg->squares) s.weight *= smax;
  if (!certificate_residual(cert.system, *eg, f).is_zero()) return std::nullopt;
  SosCertificate out = cert;
  for (std::size_t b = 0; b < eg->gram.size(); ++b) out.gram[b] = to_double(eg->gram[b]);
  fill_float_squares(out);
  out.float_residual = 0.0;
  attach_exact(out, std::move(*eg));
  out.exact_verified = true;
  return out;
}

bool verify_certificate(const SosCertificate& cert, const RationalPolynomial& f, double tol) {
  if (cert.exact) {
    RationalPolynomial total(f.vars());
    for (const auto& sq : cert.squares) total += sq.multiplier * sq.q * sq.q * sq.weight;
    if (total != f) return false;
    for (const auto& sq : cert.squares)
      if (sq.weight < 0) return false;
    return true;
  }
  auto cf = cert.system.coefficients(f);
  if (!cf) return false;
  // Rebuild the Gram matrices from the float squares and expand.
  std::vector<MatrixXd> G;
  for (int s : cert.system.block_sizes()) G.push_back(MatrixXd::Zero(s, s));
  for (const auto& sq : cert.float_squares) G[sq.block] += sq.coeffs * sq.coeffs.transpose();
  const double fn = to_double(f.is_zero() ? Rational(0) : max_abs_coeff(f));
  return gram_residual(cert.system, cert.system.to_coords(G), *cf) <= tol * (1.0 + fn);
}

WitnessCheck check_witness(const NotSosWitness& w, const std::vector<WeightedBlock>& blocks, const RationalPolynomial& f,
                           double tol_psd, double tol_sep) {
  WitnessCheck out;
  std::map<Monomial, double, GradedLexLess> lam;
  for (std::size_t i = 0; i < w.monomials.size(); ++i) lam.emplace(w.monomials[i], w.lambda(static_cast<Eigen::Index>(i)));
  auto apply = [&](const RationalPolynomial& q, bool& ok) {
    double v = 0.0;
    for (const auto& [m, c] : q.terms()) {
      auto it = lam.find(m);
      if (it == lam.end()) {
        ok = false;
        return 0.0;
      }
      v += to_double(c) * it->second;
    }
    return v;
  };
  bool ok = true;
  out.value = apply(f, ok);
  out.min_eig = std::numeric_limits<double>::infinity();
  for (const auto& blk : blocks) {
    const auto n = static_cast<Eigen::Index>(blk.basis.size());
    if (n == 0) continue;
    MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j) M(i, j) = M(j, i) = apply(blk.weight * blk.basis[i] * blk.basis[j], ok);
    out.min_eig = std::min(out.min_eig, min_eig(M));
  }
  out.ok = ok && out.value <= -tol_sep && out.min_eig >= -tol_psd;
  return out;
}

SosResult psd_via_multiplier(const RationalPolynomial& f, int k, const SosOptions& opt) {
  if (k < 0) throw std::invalid_argument("psd_via_multiplier: negative multiplier degree");
  if (f.is_zero()) return sos_decide(f, opt);
  if (!f.is_homogeneous()) throw std::invalid_argument("psd_via_multiplier: input must be a form");
  if (f.degree() % 2 != 0) throw std::invalid_argument("psd_via_multiplier: a form of odd degree takes both signs");
  RationalPolynomial s(f.vars());
  for (const auto& v : f.vars()) s += RationalPolynomial::variable(f.vars(), v).pow(2);
  SosResult r = sos_decide(s.pow(k) * f, opt);
  r.note = "multiplier (sum x_i^2)^" + std::to_string(k) + ": " + r.note;
  return r;
}

RationalPolynomial pullback(const RationalPolynomial& f, const std::vector<RationalPolynomial>& phi) {
  if (phi.size() != f.num_vars()) throw std::invalid_argument("pullback: map has the wrong number of coordinates");
  if (phi.empty()) return f;
  std::map<std::string, RationalPolynomial> assignment;
  for (std::size_t i = 0; i < phi.size(); ++i) assignment.emplace(f.vars()[i], phi[i]);
  return substitute(f, assignment, phi.front().vars());
}

SosResult pullback_sos_check(const RationalPolynomial& f, const std::vector<RationalPolynomial>& phi,
                             const Subspace& U, const SosOptions& opt) {
  return sos_decide(pullback(f, phi), U, opt);
}

}  // namespace shadowlab
