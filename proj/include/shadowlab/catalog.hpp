#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shadowlab/obstruction.hpp"
#include "shadowlab/relax.hpp"
#include "shadowlab/sos.hpp"
#include "shadowlab/subspace.hpp"

namespace shadowlab {

struct NamedForm {
  std::string name;
  RationalPolynomial polynomial;
  std::vector<std::string> vars;
  int degree = 0;
  std::string note;
};

std::vector<std::string> catalog_names();
/// Throws std::invalid_argument listing the available names.
NamedForm catalog(const std::string& name);

struct VeroneseSpec {
  int n = 0;
  int d = 0;
  bool homogeneous = false;
  std::vector<Monomial> monomials;
  int N() const { return static_cast<int>(monomials.size()); }
};

/// Affine: nonconstant monomials of degree <= d. Homogeneous: degree exactly d.
VeroneseSpec veronese_spec(int n, int d, bool homogeneous = false);
Eigen::VectorXd veronese(int n, int d, const std::vector<double>& xi, bool homogeneous = false);
std::vector<Rational> veronese(int n, int d, const std::vector<Rational>& xi, bool homogeneous = false);

/// x^i (1 <= i <= 6), y^i (1 <= i <= 4), x^i y^j (i, j in {1, 2}).
Subspace L14(std::vector<std::string> vars = {"x", "y"});

/// F(eps, x - xi) minus its constant term, eps = t^order; the first variable
/// of F plays eps and the result lives in the remaining variables.
PuiseuxPolynomial eps_shift(const RationalPolynomial& F, const std::vector<Rational>& xi, const Rational& order);

struct PsdSosReport {
  int n = 0;
  int two_d = 0;
  bool separation_expected = false;
  std::string form;
  int moment_matrix_size = 0;   // rows of the moment pencil of the dual SOS cone
  int moment_coordinates = 0;   // monomials of degree 2d
  SosVerdict verdict = SosVerdict::Inconclusive;
  std::optional<NotSosWitness> witness;
  Membership dual_membership = Membership::Borderline;  // witness in the dual SOS cone
  std::string note;
};

/// Exhibits Sigma_{n,2d} != P_{n,2d} with a catalog form, or reports that
/// no separation is expected (2d = 2, n <= 2, or (n, 2d) = (3, 4)).
PsdSosReport psd_vs_sos_demo(int n, int two_d, const SosOptions& opt = {});

enum class PipelineMode { Local, Infinitesimal };
std::string to_string(PipelineMode m);

struct PipelineEntry {
  std::vector<double> point;
  ObstructionVerdict verdict = ObstructionVerdict::Inconclusive;
  std::string reason;
  std::string ring;
  bool in_L = false;          // the shifted form (minus its constant) lies in L (L_B for infinitesimal)
  double witness_value = 0.0;
  double witness_min_eig = 0.0;
};

struct PipelineReport {
  std::string form;
  PipelineMode mode = PipelineMode::Local;
  std::string L_name;
  int L_dim = 0;
  double interior_fraction = 0.0;  // share of box samples inside S
  std::vector<PipelineEntry> entries;
  int obstructed = 0;
  int inconclusive = 0;
  std::string note;
};

struct PipelineOptions {
  int points = 5;
  std::uint64_t seed = 0;
  SosOptions sos;
};

/// Samples points of S and runs the local or infinitesimal obstruction at each.
/// Local: the catalog form shifted to the point (f(x) = p(x - eta)), L =
/// monomial_subspace(n, deg p). Infinitesimal: the form with its first
/// variable as eps, shifted in the others, L = L14 for motzkin and
/// monomial_subspace otherwise.
PipelineReport counterexample_pipeline(const std::string& form, const BasicClosedSet& S, PipelineMode mode,
                                       const PipelineOptions& opt = {});

/// Unit ball, or the unit cube [0,1]^n, as a basic closed set in x1..xn.
BasicClosedSet unit_ball(int n);
BasicClosedSet unit_cube(int n);

}  // namespace shadowlab
