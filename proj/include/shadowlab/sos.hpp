#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shadowlab/gram.hpp"
#include "shadowlab/sdp.hpp"
#include "shadowlab/subspace.hpp"

namespace shadowlab {

/// f has a monomial that no product of basis elements can produce.
class NotInSpanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class SosVerdict { Sos, NotSos, Inconclusive };
std::string to_string(SosVerdict v);

struct SosOptions {
  SdpOptions sdp;
  double tol_sep = 1e-6;    // a witness needs lambda(f) <= -tol_sep
  double tol_psd = 1e-9;    // and moment matrices >= -tol_psd
  bool rationalize = true;
  std::vector<std::int64_t> denominator_bounds{1000000, 1000000000};
  std::uint64_t seed = 0;   // witness smoothing points
  int face_reductions = 4;  // boundary retries on a smaller Gram face
};

/// f = sum_b h_b w_b' G_b w_b with G_b >= 0.
struct SosCertificate {
  GramSystem system;
  std::vector<Eigen::MatrixXd> gram;
  std::optional<ExactGram> exact;
  /// Exact mode: f = sum weight * h * q^2.
  struct Square {
    Rational weight;
    RationalPolynomial multiplier;
    RationalPolynomial q;
  };
  std::vector<Square> squares;
  /// Float mode: sqrt-eigenvalue scaled eigenvectors per block.
  struct FloatSquare {
    int block;
    Eigen::VectorXd coeffs;
  };
  std::vector<FloatSquare> float_squares;
  double float_residual = 0.0;  // max |K g - f| over coefficients
  bool exact_verified = false;
};

/// Linear functional on the monomials of sum h_b W_b W_b, nonnegative on
/// every h_b q^2 (moment matrices PSD) and negative on f.
struct NotSosWitness {
  std::vector<Monomial> monomials;
  Eigen::VectorXd lambda;
  std::vector<Eigen::MatrixXd> moments;
  double value = 0.0;    // lambda(f)
  double min_eig = 0.0;  // over all moment matrices
};

struct SosResult {
  SosVerdict verdict = SosVerdict::Inconclusive;
  double gamma = 0.0;    // max gamma with f - gamma * (sum of basis squares) in the cone, after scaling f
  SdpStatus status = SdpStatus::NumericalFailure;
  std::optional<SosCertificate> certificate;
  std::optional<NotSosWitness> witness;
  std::string note;
};

SosResult sos_decide(const RationalPolynomial& f, const Subspace& U, const SosOptions& opt = {});
/// Weighted version: f in sum_b h_b * Sigma(W_b)^2.
SosResult sos_decide(const RationalPolynomial& f, const std::vector<WeightedBlock>& blocks, const SosOptions& opt = {});
/// Gram basis from the Newton polytope of f.
SosResult sos_decide(const RationalPolynomial& f, const SosOptions& opt = {});

/// Exact certificate from a float one; nullopt when rounding fails.
std::optional<SosCertificate> rationalize(const SosCertificate& cert, const RationalPolynomial& f,
                                          const std::vector<std::int64_t>& denominator_bounds = {1000000, 1000000000});

/// Re-checks a certificate by polynomial expansion (exact when rational).
bool verify_certificate(const SosCertificate& cert, const RationalPolynomial& f, double tol = 1e-7);

/// Re-checks a witness from scratch: moment matrices rebuilt from products of
/// the block data, lambda(f) from the coefficients of f.
struct WitnessCheck {
  bool ok = false;
  double value = 0.0;
  double min_eig = 0.0;
};
WitnessCheck check_witness(const NotSosWitness& w, const std::vector<WeightedBlock>& blocks, const RationalPolynomial& f,
                           double tol_psd = 1e-9, double tol_sep = 1e-6);

/// SOS test of (sum x_i^2)^k * f over its Newton basis. f must be a form.
SosResult psd_via_multiplier(const RationalPolynomial& f, int k, const SosOptions& opt = {});

/// f o phi, phi given as one polynomial per target variable.
RationalPolynomial pullback(const RationalPolynomial& f, const std::vector<RationalPolynomial>& phi);
SosResult pullback_sos_check(const RationalPolynomial& f, const std::vector<RationalPolynomial>& phi,
                             const Subspace& U, const SosOptions& opt = {});

}  // namespace shadowlab
