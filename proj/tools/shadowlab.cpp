// shadowlab command line: JSON in, JSON (or a plain table with --pretty) out.
// Exit status: 0 done, 2 some verdict inconclusive, 1 error.

#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>

#include "shadowlab/catalog.hpp"
#include "shadowlab/lift.hpp"
#include "shadowlab/obstruction.hpp"
#include "shadowlab/relax.hpp"
#include "shadowlab/serialize.hpp"

using namespace shadowlab;

namespace {

struct Common {
  double tol_gap = 1e-8;
  int max_iter = 200;
  std::string trunc_order = "12";
  std::uint64_t seed = 0;
  bool pretty = false;

  SdpOptions sdp() const {
    SdpOptions o;
    o.tol_gap = tol_gap;
    o.max_iter = max_iter;
    return o;
  }
  SosOptions sos() const {
    SosOptions o;
    o.sdp = sdp();
    o.seed = seed;
    return o;
  }
  ShadowOptions shadow() const {
    ShadowOptions o;
    o.sdp = sdp();
    return o;
  }
};

bool has_inconclusive(const json& j) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "verdict" && it.value() == "inconclusive") return true;
      if (has_inconclusive(it.value())) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j)
      if (has_inconclusive(v)) return true;
  }
  return false;
}

std::string cell(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

bool scalar(const json& v) { return !v.is_object() && !v.is_array(); }

// Objects as "key  value" lines, arrays of flat objects as tables.
void render(std::ostream& out, const json& j, const std::string& pad) {
  if (!j.is_object()) {
    out << pad << cell(j) << "\n";
    return;
  }
  std::size_t w = 0;
  for (auto it = j.begin(); it != j.end(); ++it) w = std::max(w, it.key().size());
  for (auto it = j.begin(); it != j.end(); ++it) {
    const json& v = it.value();
    if (scalar(v) || (v.is_array() && (v.empty() || scalar(v[0])))) {
      out << pad << it.key() << std::string(w - it.key().size() + 2, ' ') << cell(v) << "\n";
    } else if (v.is_array() && v[0].is_object()) {
      out << pad << it.key() << ":\n";
      std::vector<std::string> cols;
      for (auto c = v[0].begin(); c != v[0].end(); ++c)
        if (scalar(c.value()) || (c.value().is_array() && (c.value().empty() || scalar(c.value()[0])))) cols.push_back(c.key());
      std::vector<std::size_t> width;
      for (const auto& c : cols) width.push_back(c.size());
      for (const auto& row : v)
        for (std::size_t k = 0; k < cols.size(); ++k) width[k] = std::max(width[k], cell(row.value(cols[k], json())).size());
      out << pad << "  ";
      for (std::size_t k = 0; k < cols.size(); ++k) out << cols[k] << std::string(width[k] - cols[k].size() + 2, ' ');
      out << "\n";
      for (const auto& row : v) {
        out << pad << "  ";
        for (std::size_t k = 0; k < cols.size(); ++k) {
          const std::string s = cell(row.value(cols[k], json()));
          out << s << std::string(width[k] - s.size() + 2, ' ');
        }
        out << "\n";
      }
    } else if (v.is_object()) {
      out << pad << it.key() << ":\n";
      render(out, v, pad + "  ");
    } else {
      out << pad << it.key() << std::string(w - it.key().size() + 2, ' ') << v.dump() << "\n";
    }
  }
}

RationalPolynomial load_polynomial(const std::string& arg, const std::vector<std::string>& vars = {}) {
  return polynomial_from_json(load_document(arg), vars);
}

std::vector<Rational> load_point(const std::string& arg) {
  const json j = load_document(arg);
  std::vector<Rational> out;
  if (j.is_string()) {
    std::stringstream ss(j.get<std::string>());
    std::string part;
    while (std::getline(ss, part, ',')) out.push_back(parse_rational(part));
  } else {
    for (const auto& v : j) out.push_back(v.is_string() ? parse_rational(v.get<std::string>()) : exact_rational(v.get<double>()));
  }
  return out;
}

Eigen::VectorXd load_vector(const std::string& arg) { return vector_from_json(load_document(arg)); }

BasicClosedSet load_set(const std::string& arg, int n) {
  if (arg == "ball") return unit_ball(n);
  if (arg == "cube") return unit_cube(n);
  return set_from_json(load_document(arg));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrahedral shadows, sums of squares and moment relaxations"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  bool as_json = false;
  app.add_option("--tol-gap", c.tol_gap, "SDP duality gap tolerance")->capture_default_str();
  app.add_option("--max-iter", c.max_iter, "SDP iteration limit")->capture_default_str();
  app.add_option("--trunc-order", c.trunc_order, "Puiseux truncation order")->capture_default_str();
  app.add_option("--seed", c.seed, "random seed")->capture_default_str();
  app.add_flag("--json", as_json, "JSON output (default)");
  app.add_flag("--pretty", c.pretty, "human readable output");

  json result;

  // sos-check
  auto* sos = app.add_subcommand("sos-check", "decide f in Sigma(U)^2 with a certificate or a separating functional");
  std::string sos_poly, sos_basis;
  int sos_mult = -1;
  bool sos_no_round = false;
  sos->add_option("--poly", sos_poly, "polynomial (JSON file, JSON or text)")->required();
  sos->add_option("--basis", sos_basis, "subspace U (default: Newton polytope monomials)");
  sos->add_option("--multiplier", sos_mult, "test (sum x_i^2)^k * f for this k instead");
  sos->add_flag("--no-rationalize", sos_no_round, "skip exact rounding");
  sos->callback([&] {
    SosOptions o = c.sos();
    o.rationalize = !sos_no_round;
    const RationalPolynomial f = load_polynomial(sos_poly);
    SosResult r;
    if (sos_mult >= 0) r = psd_via_multiplier(f, sos_mult, o);
    else if (!sos_basis.empty()) r = sos_decide(f, subspace_from_json(load_document(sos_basis)), o);
    else r = sos_decide(f, o);
    result = to_json(r);
    result["poly"] = to_string(f);
  });

  // obstruct
  auto* obs = app.add_subcommand("obstruct", "local or infinitesimal SOS obstruction");
  std::string obs_form, obs_mode = "local", obs_point, obs_x0;
  obs->add_option("--form", obs_form, "polynomial, or a catalog name")->required();
  obs->add_option("--mode", obs_mode, "local | infinitesimal")->check(CLI::IsMember({"local", "infinitesimal"}))->capture_default_str();
  obs->add_option("--point", obs_point, "point, e.g. \"1/3,-2/5\" (local: xi; infinitesimal: eta)");
  obs->add_option("--x0", obs_x0, "variable replaced by eps (infinitesimal mode)");
  obs->callback([&] {
    RationalPolynomial F;
    const auto names = catalog_names();
    if (std::find(names.begin(), names.end(), obs_form) != names.end()) F = catalog(obs_form).polynomial;
    else F = load_polynomial(obs_form);
    std::vector<Rational> pt = obs_point.empty() ? std::vector<Rational>{} : load_point(obs_point);
    if (obs_mode == "local") {
      if (pt.empty()) pt.assign(F.num_vars(), Rational(0));
      result = to_json(local_obstruction(F, pt, c.sos()));
    } else {
      result = to_json(infinitesimal_obstruction(F, obs_x0, pt, c.sos(), parse_rational(c.trunc_order)));
    }
    result["form"] = to_string(F);
  });

  // relax
  auto* rel = app.add_subcommand("relax", "moment relaxation K' of phi_L(S)");
  std::string rel_set, rel_L, rel_W, rel_point;
  int rel_probe = 0, rel_samples = 2000, rel_hull = 0;
  rel->add_option("--set", rel_set, "basic closed set S (JSON)")->required();
  rel->add_option("--L", rel_L, "subspace L (JSON)")->required();
  rel->add_option("--W", rel_W, "array of subspaces W_0..W_r (JSON)")->required();
  rel->add_option("--probe", rel_probe, "random directions for the exactness probe");
  rel->add_option("--samples", rel_samples, "points of S for empirical support values")->capture_default_str();
  rel->add_option("--point", rel_point, "lambda to test for membership in K'");
  rel->add_option("--hull", rel_hull, "with --point: directions for a separating g >= 0 on S");
  rel->callback([&] {
    const BasicClosedSet S = set_from_json(load_document(rel_set));
    RelaxationSpec spec;
    spec.L = subspace_from_json(load_document(rel_L));
    for (const auto& w : load_document(rel_W)) spec.W.push_back(subspace_from_json(w));
    const MomentShadow K = build_K_prime(S, spec);
    result = {{"relaxation", to_json(K)}};
    if (!rel_point.empty()) {
      const Eigen::VectorXd lam = load_vector(rel_point);
      result["membership"] = to_json(k_prime_test(K, lam, c.shadow()));
      if (rel_hull > 0) result["hull"] = to_json(hull_certificate_check(lam, S, spec.L, rel_hull, c.seed, 4000, c.sos()));
    }
    if (rel_probe > 0) result["probe"] = to_json(exactness_probe(S, K, rel_probe, c.seed, rel_samples, c.shadow()));
  });

  // dual
  auto* dual = app.add_subcommand("dual", "dual cone of a strictly feasible conic shadow");
  std::string dual_pencil, dual_a, dual_B;
  dual->add_option("--pencil", dual_pencil, "homogeneous pencil (JSON)")->required();
  dual->add_option("--functional", dual_a, "a: decide a in C*");
  dual->add_option("--matrix", dual_B, "B >= 0: the dual point (<B, M_i>)_i");
  dual->callback([&] {
    const Pencil p = pencil_from_json(load_document(dual_pencil));
    if (!dual_B.empty()) result["dual_point"] = to_json(dual_cone_point(p, matrix_from_json(load_document(dual_B))));
    if (!dual_a.empty()) result["membership"] = to_json(dual_cone_member(p, load_vector(dual_a), c.shadow()));
    if (dual_a.empty() && dual_B.empty()) throw CLI::ValidationError("dual", "give --functional or --matrix");
  });

  // member
  auto* mem = app.add_subcommand("member", "membership and support function of a shadow");
  std::string mem_pencil, mem_point, mem_dir;
  mem->add_option("--pencil", mem_pencil, "pencil (JSON)")->required();
  mem->add_option("--point", mem_point, "xi");
  mem->add_option("--direction", mem_dir, "c: max c'xi over the shadow");
  mem->callback([&] {
    const Shadow s(pencil_from_json(load_document(mem_pencil)));
    if (!mem_point.empty()) result["membership"] = to_json(shadow_contains(s, load_vector(mem_point), c.shadow()));
    if (!mem_dir.empty()) result["support"] = to_json(support(s, load_vector(mem_dir), c.shadow()));
    if (mem_point.empty() && mem_dir.empty()) throw CLI::ValidationError("member", "give --point or --direction");
  });

  // lift
  auto* lift = app.add_subcommand("lift", "square-root lift certificate for a nonnegative functional");
  std::string lift_pencil, lift_a;
  int lift_verify = 0;
  lift->add_option("--pencil", lift_pencil, "homogeneous pencil: B = M, C = N (JSON)")->required();
  lift->add_option("--functional", lift_a, "a")->required();
  lift->add_option("--verify", lift_verify, "numeric verification samples");
  lift->callback([&] {
    const Pencil p = pencil_from_json(load_document(lift_pencil));
    const LiftData L = build_lift(p.B, p.C, c.shadow());
    const LiftResult r = lift_certificate(L, load_vector(lift_a), c.shadow());
    result = {{"lift", to_json(L)}, {"result", to_json(r)}};
    if (lift_verify > 0 && r.certificate) result["verify_residual"] = verify_lift_numeric(L, *r.certificate, lift_verify, c.seed);
  });

  // veronese
  auto* ver = app.add_subcommand("veronese", "Veronese monomial list and evaluation");
  int ver_n = 0, ver_d = 0;
  bool ver_h = false;
  std::string ver_point;
  ver->add_option("--n", ver_n, "variables")->required();
  ver->add_option("--d", ver_d, "degree")->required();
  ver->add_flag("--homogeneous", ver_h, "monomials of degree exactly d");
  ver->add_option("--point", ver_point, "point to evaluate at");
  ver->callback([&] {
    result = to_json(veronese_spec(ver_n, ver_d, ver_h));
    if (!ver_point.empty()) {
      std::vector<Rational> v = veronese(ver_n, ver_d, load_point(ver_point), ver_h);
      json a = json::array();
      for (const auto& q : v) a.push_back(to_string(q));
      result["value"] = a;
    }
  });

  // sdp
  auto* sdp = app.add_subcommand("sdp", "solve an SDP in standard block form");
  std::string sdp_problem;
  sdp->add_option("--problem", sdp_problem, "SdpProblem (JSON)")->required();
  sdp->callback([&] { result = to_json(solve_sdp(sdp_problem_from_json(load_document(sdp_problem)), c.sdp())); });

  // demo
  auto* demo = app.add_subcommand("demo", "catalog objects and end-to-end workflows");
  std::string demo_what, demo_form = "motzkin", demo_set, demo_mode = "infinitesimal";
  int demo_n = 3, demo_2d = 6, demo_points = 5;
  demo->add_option("what", demo_what, "catalog | dims | psd-sos | pipeline")
      ->required()
      ->check(CLI::IsMember({"catalog", "dims", "psd-sos", "pipeline"}));
  demo->add_option("--n", demo_n, "psd-sos: variables")->capture_default_str();
  demo->add_option("--two-d", demo_2d, "psd-sos: degree")->capture_default_str();
  demo->add_option("--form", demo_form, "catalog form")->capture_default_str();
  demo->add_option("--set", demo_set, "pipeline: ball | cube | S.json (default: cube for infinitesimal, ball for local)");
  demo->add_option("--mode", demo_mode, "pipeline: local | infinitesimal")
      ->check(CLI::IsMember({"local", "infinitesimal"}))
      ->capture_default_str();
  demo->add_option("--points", demo_points, "pipeline: sampled points")->capture_default_str();
  demo->callback([&] {
    if (demo_what == "catalog") {
      result = to_json(catalog(demo_form));
    } else if (demo_what == "dims") {
      json dims = json::array();
      for (auto [n, d] : std::vector<std::pair<int, int>>{{3, 6}, {4, 4}, {2, 6}})
        dims.push_back({{"n", n}, {"d", d}, {"dim", monomial_subspace(n, d, false).dim()}});
      const auto m = catalog("motzkin"), cl = catalog("choi-lam");
      result = {{"monomial_subspace", dims},
                {"L14", L14().dim()},
                {"shift_support_motzkin", shift_support(m.polynomial).dim()},
                {"shift_support_choi_lam", shift_support(cl.polynomial).dim()}};
    } else if (demo_what == "psd-sos") {
      result = to_json(psd_vs_sos_demo(demo_n, demo_2d, c.sos()));
    } else {
      const PipelineMode mode = demo_mode == "local" ? PipelineMode::Local : PipelineMode::Infinitesimal;
      const NamedForm f = catalog(demo_form);
      const int n = static_cast<int>(f.vars.size()) - (mode == PipelineMode::Local ? 0 : 1);
      const std::string set = demo_set.empty() ? (mode == PipelineMode::Local ? "ball" : "cube") : demo_set;
      PipelineOptions po;
      po.points = demo_points;
      po.seed = c.seed;
      po.sos = c.sos();
      result = to_json(counterexample_pipeline(demo_form, load_set(set, n), mode, po));
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (c.pretty && !as_json) render(std::cout, result, "");
  else std::cout << result.dump(2) << "\n";
  return has_inconclusive(result) ? 2 : 0;
}
