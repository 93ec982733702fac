#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "shadowlab/catalog.hpp"
#include "shadowlab/lift.hpp"
#include "shadowlab/obstruction.hpp"
#include "shadowlab/relax.hpp"
#include "shadowlab/sdp.hpp"
#include "shadowlab/sos.hpp"
#include "shadowlab/spectra.hpp"
#include "shadowlab/subspace.hpp"

namespace shadowlab {

using json = nlohmann::ordered_json;

/// Infix polynomial text: "3/2*x1^2*x2 - (x1 + 1)^2 + 0.5". Without `vars`,
/// variables are the names that occur, in natural order (x2 before x10).
RationalPolynomial parse_polynomial(std::string_view text, std::vector<std::string> vars = {});

// {"vars": [...], "terms": [{"exp": [2,0], "coeff": "3/2"}, ...]}
json to_json(const RationalPolynomial& f);
RationalPolynomial polynomial_from_json(const json& j, const std::vector<std::string>& vars = {});

// {"series": [{"ord": "1/2", "coeff": "-3"}], "trunc": "7"} (trunc absent when exact)
json to_json(const PuiseuxScalar& a);
PuiseuxScalar puiseux_from_json(const json& j);
json to_json(const PuiseuxPolynomial& f);
PuiseuxPolynomial puiseux_polynomial_from_json(const json& j);

json to_json(const Monomial& m);
json to_json(const Rational& q);

// {"vars": [...], "basis": [poly, ...]}; basis entries may also be text, and
// {"vars": [...], "monomials": [[exp], ...]} is accepted on input.
json to_json(const Subspace& U);
Subspace subspace_from_json(const json& j);

/// Matrices as nested row-major arrays; a flat array of d*d numbers is also read.
json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const json& j, int d = -1);
Eigen::VectorXd vector_from_json(const json& j);

// {"d": 2, "A": M, "B": [M, ...], "C": [M, ...]}; A defaults to 0, C to [].
json to_json(const Pencil& p);
Pencil pencil_from_json(const json& j);

// {"blocks": [..], "C": [M per block], "A": [[M per block], ...], "b": [..]}
json to_json(const SdpProblem& p);
SdpProblem sdp_problem_from_json(const json& j);
json to_json(const SdpSolution& s);

// {"vars": [...], "h": [poly, ...], "box": R} or "box_lo"/"box_hi" lists.
json to_json(const BasicClosedSet& S);
BasicClosedSet set_from_json(const json& j);

json to_json(const SosCertificate& c);
json to_json(const NotSosWitness& w);
json to_json(const SosResult& r);
json to_json(const ObstructionReport& r);
json to_json(const MembershipResult& r);
json to_json(const SupportResult& r);
json to_json(const DualMembership& r);
json to_json(const ProbeReport& r);
json to_json(const HullCheck& r);
json to_json(const MomentShadow& K);
json to_json(const LiftData& L);
json to_json(const LiftResult& r);
json to_json(const VeroneseSpec& s);
json to_json(const NamedForm& f);
json to_json(const PsdSosReport& r);
json to_json(const PipelineReport& r);

/// Reads a JSON document or polynomial text from a file, or takes the
/// argument itself when no such file exists.
json load_document(const std::string& path_or_text);

}  // namespace shadowlab
