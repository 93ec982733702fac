#include "shadowlab/serialize.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace shadowlab {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// ---------------------------------------------------------------- text parser

struct Token {
  enum Kind { Number, Name, Op, End } kind;
  std::string text;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t j = i;
      while (j < s.size() && (std::isdigit(static_cast<unsigned char>(s[j])) || s[j] == '.')) ++j;
      out.push_back({Token::Number, std::string(s.substr(i, j - i))});
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Token::Name, std::string(s.substr(i, j - i))});
      i = j;
    } else if (std::string_view("+-*/^()").find(c) != std::string_view::npos) {
      out.push_back({Token::Op, std::string(1, c)});
      ++i;
    } else {
      throw std::invalid_argument(std::string("polynomial text: unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::End, ""});
  return out;
}

bool natural_less(const std::string& a, const std::string& b) {
  auto split = [](const std::string& s) {
    std::size_t k = s.size();
    while (k > 0 && std::isdigit(static_cast<unsigned char>(s[k - 1]))) --k;
    return std::make_pair(s.substr(0, k), s.substr(k));
  };
  auto [sa, da] = split(a);
  auto [sb, db] = split(b);
  if (sa != sb) return sa < sb;
  if (da.size() != db.size()) return da.size() < db.size();
  return da < db;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, std::vector<std::string> vars) : toks_(std::move(toks)), vars_(std::move(vars)) {}

  RationalPolynomial parse() {
    RationalPolynomial f = expr();
    if (peek().kind != Token::End) throw std::invalid_argument("polynomial text: trailing input at '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  bool accept(const char* op) {
    if (peek().kind == Token::Op && peek().text == op) {
      ++pos_;
      return true;
    }
    return false;
  }

  RationalPolynomial expr() {
    RationalPolynomial f = term();
    for (;;) {
      if (accept("+")) f += term();
      else if (accept("-")) f -= term();
      else return f;
    }
  }

  RationalPolynomial term() {
    RationalPolynomial f = unary();
    for (;;) {
      if (accept("*")) {
        f *= unary();
      } else if (accept("/")) {
        const RationalPolynomial g = unary();
        if (g.degree() != 0) throw std::invalid_argument("polynomial text: division by a non-constant");
        f *= Rational(1) / g.constant_term();
      } else {
        return f;
      }
    }
  }

  RationalPolynomial unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return power();
  }

  RationalPolynomial power() {
    RationalPolynomial base = atom();
    if (!accept("^")) return base;
    if (peek().kind != Token::Number || peek().text.find('.') != std::string::npos)
      throw std::invalid_argument("polynomial text: exponent must be a nonnegative integer");
    const int k = std::stoi(toks_[pos_++].text);
    return base.pow(k);
  }

  RationalPolynomial atom() {
    const Token t = peek();
    if (t.kind == Token::Number) {
      ++pos_;
      return RationalPolynomial::constant(vars_, parse_rational(t.text));
    }
    if (t.kind == Token::Name) {
      ++pos_;
      if (std::find(vars_.begin(), vars_.end(), t.text) == vars_.end())
        throw std::invalid_argument("polynomial text: unknown variable '" + t.text + "'");
      return RationalPolynomial::variable(vars_, t.text);
    }
    if (accept("(")) {
      RationalPolynomial f = expr();
      if (!accept(")")) throw std::invalid_argument("polynomial text: missing ')'");
      return f;
    }
    throw std::invalid_argument("polynomial text: unexpected '" + t.text + "'");
  }

  std::vector<Token> toks_;
  std::vector<std::string> vars_;
  std::size_t pos_ = 0;
};

std::vector<std::string> string_list(const json& j) {
  std::vector<std::string> out;
  for (const auto& v : j) out.push_back(v.get<std::string>());
  return out;
}

Rational rational_from_json(const json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_number()) return exact_rational(j.get<double>());
  throw std::invalid_argument("expected a rational as string or number");
}

json strings(const std::vector<RationalPolynomial>& ps) {
  json a = json::array();
  for (const auto& p : ps) a.push_back(to_string(p));
  return a;
}

json matrices(const std::vector<MatrixXd>& ms) {
  json a = json::array();
  for (const auto& m : ms) a.push_back(to_json(m));
  return a;
}

json exact_matrix(const RationalMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(to_string(m(i, j)));
    rows.push_back(std::move(r));
  }
  return rows;
}

json sparse_block_form(const SparseSym& s, const std::vector<int>& blocks) {
  json a = json::array();
  for (const auto& m : to_blocks(s, blocks)) a.push_back(to_json(m));
  return a;
}

SparseSym sparse_from_blocks(const json& j, const std::vector<int>& blocks) {
  if (!j.is_array() || j.size() != blocks.size()) throw std::invalid_argument("sdp: expected one matrix per block");
  SparseSym out;
  for (std::size_t b = 0; b < blocks.size(); ++b) append_dense(out, static_cast<int>(b), matrix_from_json(j[b], blocks[b]));
  return out;
}

}  // namespace

RationalPolynomial parse_polynomial(std::string_view text, std::vector<std::string> vars) {
  auto toks = tokenize(text);
  if (vars.empty()) {
    std::set<std::string, bool (*)(const std::string&, const std::string&)> names(natural_less);
    for (const auto& t : toks)
      if (t.kind == Token::Name) names.insert(t.text);
    vars.assign(names.begin(), names.end());
  }
  return Parser(std::move(toks), std::move(vars)).parse();
}

json to_json(const Rational& q) { return to_string(q); }

json to_json(const Monomial& m) { return m.exponents(); }

json to_json(const RationalPolynomial& f) {
  json terms = json::array();
  for (const auto& [m, c] : f.terms()) terms.push_back({{"exp", m.exponents()}, {"coeff", to_string(c)}});
  return {{"vars", f.vars()}, {"terms", terms}, {"text", to_string(f)}};
}

RationalPolynomial polynomial_from_json(const json& j, const std::vector<std::string>& vars) {
  if (j.is_string()) return parse_polynomial(j.get<std::string>(), vars);
  if (!j.is_object() || !j.contains("terms")) throw std::invalid_argument("polynomial: expected text or {\"vars\", \"terms\"}");
  std::vector<std::string> v = j.contains("vars") ? string_list(j.at("vars")) : vars;
  RationalPolynomial f(v);
  for (const auto& t : j.at("terms")) {
    std::vector<int> e = t.at("exp").get<std::vector<int>>();
    if (e.size() != v.size()) throw std::invalid_argument("polynomial: exponent length differs from the variable count");
    f += RationalPolynomial::monomial(v, Monomial(std::move(e)), rational_from_json(t.at("coeff")));
  }
  return f;
}

json to_json(const PuiseuxScalar& a) {
  json series = json::array();
  for (const auto& t : a.terms()) series.push_back({{"ord", to_string(t.order)}, {"coeff", to_string(t.coeff)}});
  json j = {{"series", series}};
  if (a.trunc()) j["trunc"] = to_string(*a.trunc());
  return j;
}

PuiseuxScalar puiseux_from_json(const json& j) {
  if (!j.is_object()) return PuiseuxScalar(rational_from_json(j));
  std::vector<PuiseuxScalar::Term> terms;
  for (const auto& t : j.at("series")) terms.push_back({rational_from_json(t.at("ord")), rational_from_json(t.at("coeff"))});
  std::optional<Rational> trunc;
  if (j.contains("trunc") && !j.at("trunc").is_null()) trunc = rational_from_json(j.at("trunc"));
  return PuiseuxScalar::from_terms(std::move(terms), trunc);
}

json to_json(const PuiseuxPolynomial& f) {
  json terms = json::array();
  for (const auto& [m, c] : f.terms()) terms.push_back({{"exp", m.exponents()}, {"coeff", to_json(c)}});
  return {{"vars", f.vars()}, {"terms", terms}};
}

PuiseuxPolynomial puiseux_polynomial_from_json(const json& j) {
  const auto v = string_list(j.at("vars"));
  PuiseuxPolynomial f(v);
  for (const auto& t : j.at("terms"))
    f += PuiseuxPolynomial::monomial(v, Monomial(t.at("exp").get<std::vector<int>>()), puiseux_from_json(t.at("coeff")));
  return f;
}

json to_json(const Subspace& U) { return {{"vars", U.vars()}, {"dim", U.dim()}, {"basis", strings(U.basis())}}; }

Subspace subspace_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vars")) throw std::invalid_argument("subspace: expected {\"vars\", \"basis\" | \"monomials\"}");
  const auto v = string_list(j.at("vars"));
  if (j.contains("monomials")) {
    std::vector<Monomial> ms;
    for (const auto& e : j.at("monomials")) ms.emplace_back(e.get<std::vector<int>>());
    return Subspace::from_monomials(v, ms);
  }
  std::vector<RationalPolynomial> basis;
  for (const auto& b : j.at("basis")) basis.push_back(polynomial_from_json(b, v));
  return Subspace(v, std::move(basis));
}

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) r.push_back(m(i, k));
    rows.push_back(std::move(r));
  }
  return rows;
}

json to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

MatrixXd matrix_from_json(const json& j, int d) {
  if (!j.is_array()) throw std::invalid_argument("matrix: expected an array");
  if (j.empty()) return MatrixXd::Zero(std::max(d, 0), std::max(d, 0));
  if (j[0].is_array()) {
    const auto r = static_cast<Eigen::Index>(j.size());
    const auto c = static_cast<Eigen::Index>(j[0].size());
    MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
      if (static_cast<Eigen::Index>(j[i].size()) != c) throw std::invalid_argument("matrix: ragged rows");
      for (Eigen::Index k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
    }
    if (d >= 0 && (r != d || c != d)) throw std::invalid_argument("matrix: expected size " + std::to_string(d));
    return m;
  }
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::Index side = d >= 0 ? d : 0;
  if (d < 0)
    while (side * side < n) ++side;
  if (side * side != n) throw std::invalid_argument("matrix: flat array is not d*d");
  MatrixXd m(side, side);
  for (Eigen::Index i = 0; i < n; ++i) m(i / side, i % side) = j[i].get<double>();
  return m;
}

VectorXd vector_from_json(const json& j) {
  if (j.is_string()) {
    // "1/3, -2, 0.5"
    std::vector<double> vals;
    std::stringstream ss(j.get<std::string>());
    std::string part;
    while (std::getline(ss, part, ',')) vals.push_back(to_double(parse_rational(part)));
    return Eigen::Map<VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  }
  if (!j.is_array()) throw std::invalid_argument("vector: expected an array");
  VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].is_string() ? to_double(parse_rational(j[i].get<std::string>())) : j[i].get<double>();
  return v;
}

json to_json(const Pencil& p) {
  return {{"d", p.dim()}, {"A", to_json(p.A)}, {"B", matrices(p.B)}, {"C", matrices(p.C)}};
}

Pencil pencil_from_json(const json& j) {
  if (!j.is_object() || !j.contains("B")) throw std::invalid_argument("pencil: expected {\"d\", \"A\", \"B\", \"C\"}");
  int d = j.contains("d") ? j.at("d").get<int>() : -1;
  Pencil p;
  for (const auto& m : j.at("B")) {
    p.B.push_back(matrix_from_json(m, d));
    d = static_cast<int>(p.B.back().rows());
  }
  if (j.contains("C"))
    for (const auto& m : j.at("C")) p.C.push_back(matrix_from_json(m, d));
  if (d < 0) d = j.contains("A") ? static_cast<int>(matrix_from_json(j.at("A")).rows()) : 0;
  p.A = j.contains("A") ? matrix_from_json(j.at("A"), d) : MatrixXd::Zero(d, d);
  p.check();
  return p;
}

json to_json(const SdpProblem& p) {
  json A = json::array();
  for (const auto& a : p.A) A.push_back(sparse_block_form(a, p.blocks));
  return {{"blocks", p.blocks},
          {"sense", p.sense == SdpSense::Minimize ? "minimize" : "feasibility"},
          {"C", sparse_block_form(p.C, p.blocks)},
          {"A", A},
          {"b", to_json(p.b)}};
}

SdpProblem sdp_problem_from_json(const json& j) {
  SdpProblem p;
  p.blocks = j.at("blocks").get<std::vector<int>>();
  if (j.contains("sense")) p.sense = j.at("sense").get<std::string>() == "feasibility" ? SdpSense::Feasibility : SdpSense::Minimize;
  if (j.contains("C")) p.C = sparse_from_blocks(j.at("C"), p.blocks);
  const VectorXd b = vector_from_json(j.at("b"));
  if (static_cast<std::size_t>(b.size()) != j.at("A").size()) throw std::invalid_argument("sdp: A and b differ in length");
  for (std::size_t i = 0; i < j.at("A").size(); ++i) p.add_constraint(sparse_from_blocks(j.at("A")[i], p.blocks), b(static_cast<Eigen::Index>(i)));
  p.check();
  return p;
}

json to_json(const SdpSolution& s) {
  return {{"status", to_string(s.status)},
          {"primal_objective", s.primal_objective},
          {"dual_objective", s.dual_objective},
          {"gap", s.gap},
          {"primal_infeasibility", s.primal_infeasibility},
          {"dual_infeasibility", s.dual_infeasibility},
          {"iterations", s.iterations},
          {"certificate_residual", s.certificate_residual},
          {"message", s.message},
          {"X", matrices(s.X)},
          {"y", to_json(s.y)},
          {"S", matrices(s.S)}};
}

json to_json(const BasicClosedSet& S) {
  return {{"vars", S.vars}, {"h", strings(S.h)}, {"box_lo", S.box_lo}, {"box_hi", S.box_hi}};
}

BasicClosedSet set_from_json(const json& j) {
  const auto v = string_list(j.at("vars"));
  std::vector<RationalPolynomial> h;
  for (const auto& g : j.at("h")) h.push_back(polynomial_from_json(g, v));
  BasicClosedSet S = make_set(v, std::move(h), j.contains("box") ? j.at("box").get<double>() : 1.0);
  if (j.contains("box_lo")) S.box_lo = j.at("box_lo").get<std::vector<double>>();
  if (j.contains("box_hi")) S.box_hi = j.at("box_hi").get<std::vector<double>>();
  S.check();
  return S;
}

json to_json(const SosCertificate& c) {
  json blocks = json::array();
  for (const auto& b : c.system.blocks) blocks.push_back({{"weight", to_string(b.weight)}, {"basis", strings(b.basis)}});
  json squares = json::array();
  for (const auto& s : c.squares)
    squares.push_back({{"weight", to_string(s.weight)}, {"multiplier", to_string(s.multiplier)}, {"q", to_string(s.q)}});
  json fsq = json::array();
  for (const auto& s : c.float_squares) fsq.push_back({{"block", s.block}, {"coeffs", to_json(s.coeffs)}});
  json j = {{"blocks", blocks}, {"gram", matrices(c.gram)}, {"float_residual", c.float_residual},
            {"exact", c.exact.has_value()}, {"exact_verified", c.exact_verified}};
  if (c.exact) {
    json g = json::array();
    for (const auto& m : c.exact->gram) g.push_back(exact_matrix(m));
    j["exact_gram"] = g;
    j["denominator_bound"] = c.exact->denominator_bound;
    j["squares"] = squares;
  } else {
    j["float_squares"] = fsq;
  }
  return j;
}

json to_json(const NotSosWitness& w) {
  json ms = json::array();
  for (const auto& m : w.monomials) ms.push_back(m.exponents());
  return {{"value", w.value}, {"min_eig", w.min_eig}, {"monomials", ms}, {"lambda", to_json(w.lambda)},
          {"moments", matrices(w.moments)}};
}

json to_json(const SosResult& r) {
  json j = {{"verdict", to_string(r.verdict)}, {"gamma", r.gamma}, {"status", to_string(r.status)}, {"note", r.note}};
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

json to_json(const ObstructionReport& r) {
  json j = {{"verdict", to_string(r.verdict)}, {"site", r.site}, {"reason", r.reason}, {"ring", r.ring},
            {"reduced", to_string(r.reduced)}, {"note", r.note}};
  if (r.witness) j["witness"] = to_json(*r.witness);
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  return j;
}

json to_json(const MembershipResult& r) {
  json j = {{"verdict", to_string(r.verdict)}, {"margin", r.margin}, {"status", to_string(r.status)}, {"eta", to_json(r.eta)}};
  if (r.verdict == Membership::Out && r.separator.size() > 0) j["separator"] = to_json(r.separator);
  return j;
}

json to_json(const SupportResult& r) {
  return {{"value", r.value}, {"upper_bound", r.upper_bound}, {"xi", to_json(r.xi)}, {"eta", to_json(r.eta)},
          {"at_box", r.at_box}, {"status", to_string(r.status)}};
}

json to_json(const DualMembership& r) {
  json j = {{"in_dual", r.in_dual}, {"residual", r.residual}};
  if (r.in_dual) j["B"] = to_json(r.B);
  else {
    j["xi"] = to_json(r.xi);
    j["eta"] = to_json(r.eta);
  }
  return j;
}

json to_json(const ProbeReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"direction", to_json(e.direction)}, {"relaxation_value", e.relaxation_value},
                       {"sample_value", e.sample_value}, {"gap", e.gap}, {"status", to_string(e.status)}});
  return {{"max_gap", r.max_gap}, {"worst_direction", to_json(r.worst_direction)}, {"samples", r.samples},
          {"failures", r.failures}, {"entries", entries}};
}

json to_json(const HullCheck& r) {
  json j = {{"found", r.found}, {"directions", r.directions}};
  if (r.found) {
    j["g"] = to_string(r.g);
    j["value"] = r.value;
    j["min_sampled"] = r.min_sampled;
    j["confidence"] = r.confidence;
    if (r.certificate) j["certificate"] = to_json(*r.certificate);
  }
  return j;
}

json to_json(const MomentShadow& K) {
  json systems = json::array();
  for (const auto& s : K.systems)
    systems.push_back({{"vars", s.vars}, {"monomials", static_cast<int>(s.monomials.size())}, {"free", static_cast<int>(s.free.cols())}});
  return {{"L", to_json(K.L)}, {"dim", K.dim()}, {"lifted_dim", K.shadow.lifted_dim()}, {"pencil_size", K.shadow.pencil().dim()},
          {"systems", systems}};
}

json to_json(const LiftData& L) {
  json M = json::array(), N = json::array();
  for (const auto& m : L.M) M.push_back(exact_matrix(m));
  for (const auto& n : L.N) N.push_back(exact_matrix(n));
  return {{"d", L.d}, {"x_vars", L.x_vars}, {"y_vars", L.y_vars}, {"z_vars", L.z_vars}, {"M", M}, {"N", N},
          {"relations", strings(L.relations)}, {"witness_xi", to_json(L.witness_xi)}, {"witness_eta", to_json(L.witness_eta)},
          {"witness_min_eig", L.witness_min_eig}};
}

json to_json(const LiftResult& r) {
  json j = {{"nonnegative", r.nonnegative}};
  if (!r.nonnegative) {
    j["xi"] = to_json(r.xi);
    j["eta"] = to_json(r.eta);
  }
  if (r.certificate) {
    const auto& c = *r.certificate;
    json sq = json::array();
    for (const auto& s : c.exact_squares) sq.push_back({{"weight", to_string(s.weight)}, {"q", to_string(s.q)}});
    json cert = {{"a", to_json(c.a)}, {"B", to_json(c.B)}, {"V", to_json(c.V)}, {"squares", strings(c.squares)},
                 {"core_identity", c.core_identity}, {"sqrt_residual", c.sqrt_residual}, {"exact", c.exact},
                 {"trace_identity", c.trace_identity}};
    if (c.B_exact) cert["B_exact"] = exact_matrix(*c.B_exact);
    if (c.exact) cert["exact_squares"] = sq;
    j["certificate"] = cert;
  }
  return j;
}

json to_json(const VeroneseSpec& s) {
  json ms = json::array();
  for (const auto& m : s.monomials) ms.push_back(m.exponents());
  return {{"n", s.n}, {"d", s.d}, {"homogeneous", s.homogeneous}, {"N", s.N()}, {"monomials", ms}};
}

json to_json(const NamedForm& f) {
  return {{"name", f.name}, {"vars", f.vars}, {"degree", f.degree}, {"polynomial", to_json(f.polynomial)}, {"note", f.note}};
}

json to_json(const PsdSosReport& r) {
  json j = {{"n", r.n}, {"two_d", r.two_d}, {"separation_expected", r.separation_expected}};
  if (r.separation_expected) {
    j["form"] = r.form;
    j["moment_matrix_size"] = r.moment_matrix_size;
    j["moment_coordinates"] = r.moment_coordinates;
    j["verdict"] = to_string(r.verdict);
    j["dual_membership"] = to_string(r.dual_membership);
    if (r.witness) j["witness"] = to_json(*r.witness);
  }
  j["note"] = r.note;
  return j;
}

json to_json(const PipelineReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"point", e.point}, {"verdict", to_string(e.verdict)}, {"reason", e.reason}, {"ring", e.ring},
                       {"in_L", e.in_L}, {"witness_value", e.witness_value}, {"witness_min_eig", e.witness_min_eig}});
  return {{"form", r.form}, {"mode", to_string(r.mode)}, {"L", r.L_name}, {"L_dim", r.L_dim},
          {"interior_fraction", r.interior_fraction}, {"obstructed", r.obstructed}, {"inconclusive", r.inconclusive},
          {"entries", entries}, {"note", r.note}};
}

json load_document(const std::string& path_or_text) {
  std::string text = path_or_text;
  if (std::ifstream in(path_or_text); in) {
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[' || text[first] == '"'))
    return json::parse(text);
  return json(text);
}

}  // namespace shadowlab
