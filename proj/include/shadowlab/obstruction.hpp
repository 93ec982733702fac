#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shadowlab/puiseux.hpp"
#include "shadowlab/sos.hpp"

namespace shadowlab {

enum class ObstructionVerdict { Obstructed, NotObstructed, Inconclusive };
std::string to_string(ObstructionVerdict v);

struct ObstructionReport {
  ObstructionVerdict verdict = ObstructionVerdict::Inconclusive;
  std::string site;    // "point (a, b, ...)" or "infinitesimal"
  std::string reason;  // short code, e.g. "non_sos_lowest_form", "odd_lowest_form", "positive_value"
  std::string ring;    // where the failure to be a sum of squares is certified
  RationalPolynomial reduced;  // lowest form, or F(1, x)
  std::optional<NotSosWitness> witness;
  std::optional<SosCertificate> certificate;
  std::string note;
};

/// Lowest homogeneous part of f(x + xi) and an SOS test on it.
ObstructionReport local_obstruction(const RationalPolynomial& f, const std::vector<Rational>& xi,
                                    const SosOptions& opt = {});

/// With g(x) = F(eps, x - eta): residue(divide_eps_power(g(eta + eps x), d)),
/// computed over Puiseux scalars (eps = t, cut at trunc_order). `x0` is the
/// variable replaced by eps (default: the first one); eta defaults to 0.
/// F must be a form; the result is F(1, x).
RationalPolynomial infinitesimal_reduction(const RationalPolynomial& F, const std::string& x0 = "",
                                           const std::vector<Rational>& eta = {},
                                           const Rational& trunc_order = Rational(12));

/// SOS test of the reduction above over monomials of degree <= d/2.
/// Obstructed means F(eps, x - eta) is not a sum of squares in
/// B[x] / <x>^(d+1) after the substitution x -> eta + eps x.
ObstructionReport infinitesimal_obstruction(const RationalPolynomial& F, const std::string& x0 = "",
                                            const std::vector<Rational>& eta = {}, const SosOptions& opt = {},
                                            const Rational& trunc_order = Rational(12));

}  // namespace shadowlab
