#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shadowlab/rational.hpp"
#include "shadowlab/spectra.hpp"
#include "shadowlab/subspace.hpp"

namespace shadowlab {

/// Square-root variety data for the strictly feasible cone pencil
/// M(x) + N(y): relations Z^2 = M(x) + N(y), Z symmetric with entries z_mu_nu.
struct LiftData {
  std::vector<RationalMatrix> M;
  std::vector<RationalMatrix> N;
  int d = 0;
  std::vector<std::string> x_vars, y_vars, z_vars;  // z_vars: z_1_1, z_1_2, ..., mu <= nu
  std::vector<std::string> vars;                    // x, y, z
  Subspace U;                                       // span of the z_mu_nu
  std::vector<RationalPolynomial> relations;        // (Z^2 - M(x) - N(y))_mu_nu, mu <= nu
  Eigen::VectorXd witness_xi, witness_eta;
  double witness_min_eig = 0.0;

  Pencil pencil() const;
  /// Symmetric matrix of z variables as polynomials.
  std::vector<std::vector<RationalPolynomial>> Z() const;
};

LiftData build_lift(const std::vector<Eigen::MatrixXd>& M, const std::vector<Eigen::MatrixXd>& N = {},
                    const ShadowOptions& opt = {});

struct LiftCertificate {
  Eigen::VectorXd a;
  Eigen::MatrixXd B;
  Eigen::MatrixXd V;                        // psd_sqrt(B)
  std::vector<RationalPolynomial> squares;  // (Z V)_mu_nu, V read exactly from its doubles
  bool core_identity = false;               // <ZV, ZV> = <V^2, Z^2> exactly
  double sqrt_residual = 0.0;               // max |V^2 - B|
  /// Exact mode, when B rounds to a rational PSD solution of the trace equations.
  bool exact = false;
  std::optional<RationalMatrix> B_exact;
  struct Square {
    Rational weight;
    RationalPolynomial q;  // linear form in the z variables
  };
  std::vector<Square> exact_squares;        // sum weight * q^2 = <B, Z^2> exactly
  bool trace_identity = false;              // <B, M(x) + N(y)> = a'x exactly
};

struct LiftResult {
  bool nonnegative = false;
  std::optional<LiftCertificate> certificate;
  Eigen::VectorXd xi;  // NotNonnegative: cone point with a'xi < 0
  Eigen::VectorXd eta;
};

LiftResult lift_certificate(const LiftData& lift, const Eigen::VectorXd& a, const ShadowOptions& opt = {});

/// <Z V, Z V> - <V^2, Z^2> expanded exactly; zero for every symmetric V.
RationalPolynomial core_identity_residual(const LiftData& lift, const RationalMatrix& V);

/// Max |a'xi - ||A V||_F^2| over sampled (xi, eta) with W = M(xi) + N(eta) >= 0
/// and A = psd_sqrt(W).
double verify_lift_numeric(const LiftData& lift, const LiftCertificate& cert, int samples, std::uint64_t seed = 0);

}  // namespace shadowlab
