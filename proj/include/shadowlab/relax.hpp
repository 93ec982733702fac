#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shadowlab/gram.hpp"
#include "shadowlab/sos.hpp"
#include "shadowlab/spectra.hpp"
#include "shadowlab/subspace.hpp"

namespace shadowlab {

/// S = {x : h_i(x) >= 0}. The box only drives rejection sampling.
struct BasicClosedSet {
  std::vector<std::string> vars;
  std::vector<RationalPolynomial> h;
  std::vector<double> box_lo;
  std::vector<double> box_hi;

  int ambient() const { return static_cast<int>(vars.size()); }
  bool contains(const std::vector<double>& x, double tol = 0.0) const;
  /// Up to `count` uniform points of S inside the box (rejection sampling).
  std::vector<std::vector<double>> sample(int count, std::mt19937_64& rng, int max_tries_factor = 1000) const;
  void check() const;
};

/// Set defined by the given generators inside [-R, R]^n for sampling.
BasicClosedSet make_set(std::vector<std::string> vars, std::vector<RationalPolynomial> h, double box = 1.0);

struct RelaxationSpec {
  Subspace L;               // 1 not in L
  std::vector<Subspace> W;  // W_0 (weight 1), W_1..W_r (weights h_i)
};

/// A shadow in the coordinates lambda = (lambda(l_1), ..., lambda(l_n)) of a
/// basis of L. Each system carries a functional Lambda on a monomial list,
/// affine in (lambda, eta): Lambda = offset + lin * lambda + free * eta_block.
struct MomentShadow {
  Subspace L;
  Shadow shadow;
  struct System {
    std::vector<std::string> vars;
    std::vector<Monomial> monomials;
    RationalMatrix offset;  // N x 1
    RationalMatrix lin;     // N x n
    RationalMatrix free;    // N x m_s
    int eta_begin = 0;
  };
  std::vector<System> systems;

  int dim() const { return L.dim(); }
  /// Values of the system's Lambda on its monomials.
  Eigen::VectorXd extension(int system, const Eigen::VectorXd& lambda, const Eigen::VectorXd& eta) const;
};

/// K' = {lambda : lambda' in C(W_0..W_r)^*}, in moment form: some Lambda on
/// the monomials of L_1 and all h_i W_i W_i extends lambda' (lambda'(1) = 1)
/// and has PSD localizing matrices.
MomentShadow build_K_prime(const BasicClosedSet& S, const RelaxationSpec& spec);

Membership k_prime_member(const MomentShadow& K, const Eigen::VectorXd& lambda, const ShadowOptions& opt = {});
MembershipResult k_prime_test(const MomentShadow& K, const Eigen::VectorXd& lambda, const ShadowOptions& opt = {});

/// phi_L(x) = (l_1(x), ..., l_n(x)).
Eigen::VectorXd evaluation_functional(const Subspace& L, const std::vector<double>& x);

struct ProbeEntry {
  Eigen::VectorXd direction;
  double relaxation_value = 0.0;  // max over K'
  double sample_value = 0.0;      // max over sampled points of S
  double gap = 0.0;
  SdpStatus status = SdpStatus::NumericalFailure;
};

struct ProbeReport {
  std::vector<ProbeEntry> entries;
  double max_gap = 0.0;
  Eigen::VectorXd worst_direction;
  int samples = 0;
  int failures = 0;
};

/// Compares the support function of K' with the empirical one of phi_L(S)
/// on `budget` random unit directions.
ProbeReport exactness_probe(const BasicClosedSet& S, const RelaxationSpec& spec, int budget, std::uint64_t seed = 0,
                            int samples = 2000, const ShadowOptions& opt = {});
ProbeReport exactness_probe(const BasicClosedSet& S, const MomentShadow& K, int budget, std::uint64_t seed = 0,
                            int samples = 2000, const ShadowOptions& opt = {});

/// One pullback datum: phi maps source variables to the target variables of
/// L; f in L_1 is tested through phi^*(f) in sum_b h_b Sigma(U_b)^2.
struct PullbackMap {
  std::vector<RationalPolynomial> phi;
  std::vector<WeightedBlock> blocks;
};
PullbackMap plain_map(std::vector<RationalPolynomial> phi, const Subspace& U);

/// Intersection over the maps of the duals of C_i = {f in L_1 : phi_i^*(f) in
/// sum h Sigma U^2}, sliced at lambda'(1) = 1.
MomentShadow umker_shadow(const Subspace& L, const std::vector<PullbackMap>& maps);

struct HullCheck {
  bool found = false;
  RationalPolynomial g;           // g in R1 + L, g >= 0 on S (sampled or certified)
  double value = 0.0;             // lambda'(g)
  double min_sampled = 0.0;       // min of g over the validation samples
  std::string confidence;         // "certified" or "sampled-only"
  std::optional<SosCertificate> certificate;
  int directions = 0;
};

/// Looks for g in R1 + L with g >= 0 on S and lambda'(g) < 0.
HullCheck hull_certificate_check(const Eigen::VectorXd& lambda, const BasicClosedSet& S, const Subspace& L,
                                 int budget, std::uint64_t seed = 0, int samples = 4000, const SosOptions& sos = {});

}  // namespace shadowlab
