// phb: JSON-driven front end over the library.  Every subcommand reads one
// JSON document (--input, or stdin) and writes one JSON report.

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json_io.hpp"

using namespace phb;
using namespace phb::io;

namespace {

constexpr int kOk = 0, kNegative = 2, kPrecondition = 3, kConvergence = 4;

struct Context {
  json in;
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
  bool inverse = false;
  bool csv = false;
  std::vector<std::string> warnings;
  int verdict_exit = kOk;
  std::string csv_text;
};

using Command = std::function<json(Context&)>;

json tagged(json value, const std::string& method) { return {{"value", std::move(value)}, {"method", method}}; }

RootDatum root_datum_of(const json& j) {
  const std::string t = j.at("type").get<std::string>();
  if (t.size() != 1) throw Error("BadInput", "type is one of A, B, C, D");
  return build_root_datum(t[0], j.at("rank").get<int>());
}

json qvecs(const std::vector<QVec>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(from_qvec(v));
  return a;
}

json cmd_rootsys(Context& c) {
  auto rd = root_datum_of(c.in);
  return {{"label", type_label(rd)},
          {"rank", rd.rank},
          {"simple_roots", qvecs(rd.simple_roots)},
          {"positive_roots", qvecs(rd.positive_roots)},
          {"coroots", qvecs(rd.coroots)},
          {"cartan_matrix", from_qmat(rd.cartan_matrix())},
          {"inner_product", from_qmat(rd.inner_product)},
          {"cochar_lattice_basis", qvecs(rd.cochar_lattice_basis)},
          {"weyl_group_order", tagged(weyl_group_order(rd), "orbit enumeration")}};
}

json cmd_alcove_normalize(Context& c) {
  auto rd = root_datum_of(c.in);
  QVec a = to_qvec(c.in.at("weight"));
  if (static_cast<int>(a.size()) != rd.rank) throw Error("BadInput", "weight has the wrong length");
  auto res = alcove_normalize(rd, a, c.in.value("search_bound", 64));
  QVec x(a);
  for (size_t i = 0; i < a.size(); ++i) x[i] = res.k * a[i] + res.lattice_vector[i];
  const bool verified = in_cochar_lattice(rd, res.lattice_vector) && in_A_prime(rd, x, Scope::H) &&
                        alcove_membership(rd, res.weyl.reduced).cls != AlcoveClass::Outside;
  if (alcove_membership(rd, a).cls == AlcoveClass::Boundary) c.warnings.push_back("input weight lies on an alcove wall");
  return {{"k", tagged(res.k, "exact search")},
          {"lattice_vector", from_qvec(res.lattice_vector)},
          {"lattice_coords", from_qvec(res.lattice_coords)},
          {"shifted", from_qvec(x)},
          {"weyl_word", res.weyl.word},
          {"reduced", from_qvec(res.weyl.reduced)},
          {"verified", verified}};
}

Target target_of(const json& j) {
  const std::string t = j.value("target", "gC");
  if (t == "gC") return Target::gC;
  if (t == "hC") return Target::hC;
  if (t == "mC") return Target::mC;
  throw Error("BadInput", "target is gC, hC or mC");
}

json cmd_parabolic(Context& c) {
  auto r = build_realization(to_group(c.in.at("group")));
  auto p = parabolic_from(r, to_cmat(c.in.at("s")), target_of(c.in));
  json spaces = json::array();
  for (const auto& e : p.spaces) spaces.push_back({{"mu", e.mu}, {"dim", e.basis.size()}});
  return {{"group", r.label},
          {"eigenspaces", tagged(spaces, "ad(s) eigendecomposition")},
          {"dim_p", p.p_basis.size()},
          {"dim_l", p.l_basis.size()},
          {"dim_n", p.n_basis.size()}};
}

json cmd_degree_relative(Context& c) {
  if (c.in.contains("flag_s")) {
    auto a = to_flag(c.in.at("flag_s")), b = to_flag(c.in.at("flag_sigma"));
    json out = {{"value", tagged(from_q(relative_degree_filtration(a, b)), "filtration_pairing")}};
    if (c.in.value("numeric_check", false)) {
      auto num = relative_degree(flag_element(a), flag_element(b));
      out["numeric"] = tagged(num.value, num.method);
      out["agreement"] = std::abs(num.value - to_double(relative_degree_filtration(a, b)));
    }
    return out;
  }
  auto res = relative_degree(to_cmat(c.in.at("s")), to_cmat(c.in.at("sigma")), c.in.value("b_scale", 1.0));
  json trace = json::array();
  for (auto [t, v] : res.t_trace) trace.push_back({t, v});
  json out = {{"value", tagged(res.value, res.method)}, {"monotone", res.monotone}, {"max_increase", res.max_increase}};
  if (res.agreement) out["agreement"] = *res.agreement;
  if (c.in.value("trace", false)) out["t_trace"] = trace;
  if (!res.monotone) c.warnings.push_back("t-trace is not monotone");
  return out;
}

json cmd_degree_parabolic(Context& c) {
  std::vector<WeightedFlag> alphas;
  for (const auto& a : c.in.at("alphas")) alphas.push_back(to_flag(a));
  const json& rj = c.in.at("reduction");
  FlagReduction red;
  red.ranks = rj.at("ranks").get<std::vector<int>>();
  red.degrees = to_qvec(rj.at("degrees"));
  red.character = to_qvec(rj.at("character"));
  for (const auto& b : rj.at("fibre_bases")) red.fibre_bases.push_back(to_qmat(b));
  auto d = parabolic_degree(alphas, red, c.in.value("numeric_check", false));
  json local = json::array();
  for (const auto& q : d.local) local.push_back(from_q(q));
  json out = {{"global", tagged(from_q(d.global), "sum of c_j deg(gr_j)")},
              {"local", tagged(local, "filtration_pairing")},
              {"total", tagged(from_q(d.total), "global - sum(local)")}};
  if (d.numeric_check) out["numeric_check"] = *d.numeric_check;
  return out;
}

StabilityOptions stability_options(const json& j) {
  StabilityOptions opt;
  opt.degree_sweep = j.value("degree_sweep", opt.degree_sweep);
  if (j.contains("certificate")) {
    opt.exhaustive = j.value("exhaustive", false);
    for (const auto& cj : j.at("certificate")) {
      CandidateReduction cr;
      cr.id = cj.value("id", "");
      cr.subset = cj.at("subset").get<std::vector<int>>();
      if (cj.contains("character")) cr.character = to_qvec(cj.at("character"));
      opt.certificate.push_back(cr);
    }
  }
  return opt;
}

json slope_json(const SlopeEntry& e) {
  return {{"reduction", e.reduction_id},
          {"character", e.character_id},
          {"pardeg", from_q(e.pardeg)},
          {"slope", from_q(e.slope)}};
}

json cmd_stability(Context& c) {
  auto d = to_parhiggs(c.in);
  auto v = stability_check(d, stability_options(c.in));
  json table = json::array();
  for (const auto& e : v.slope_table) table.push_back(slope_json(e));
  json out = {{"verdict", tagged(verdict_name(v.verdict), "candidate reduction search")},
              {"complete", v.complete},
              {"search_bound", v.search_bound},
              {"slope_table", table},
              {"note", v.note}};
  if (v.witness) out["witness"] = slope_json(*v.witness);
  if (v.verdict == Verdict::Unstable) c.verdict_exit = kNegative;
  if (!v.complete) c.warnings.push_back(v.note);
  return out;
}

json cmd_genericity(Context& c) {
  std::vector<QVec> w;
  for (const auto& x : c.in.at("weights")) w.push_back(to_qvec(x));
  auto g = genericity_check(w, c.in.value("include_determinant", true));
  json out = {{"generic", tagged(g.generic, "exact sums mod 1")}};
  if (!g.generic) {
    out["character"] = g.character;
    out["value"] = from_q(g.value);
    out["positions"] = g.positions;
    c.verdict_exit = kNegative;
  }
  return out;
}

LatticeMode lattice_mode_of(const std::string& s) {
  if (s == "GL") return LatticeMode::GL;
  if (s == "SL") return LatticeMode::SL;
  if (s == "PGL") return LatticeMode::PGL;
  throw Error("BadInput", "mode is GL, SL or PGL");
}

std::string lattice_mode_name(LatticeMode m) { return m == LatticeMode::GL ? "GL" : m == LatticeMode::SL ? "SL" : "PGL"; }

// A hecke report can be fed back: its outputs.data is a complete hecke input.
json cmd_hecke(Context& c) {
  json in = c.in.contains("outputs") ? c.in.at("outputs").at("data") : c.in;
  std::vector<QVec> lambdas;
  for (const auto& l : in.at("lambdas")) {
    lambdas.push_back(to_qvec(l));
    if (c.inverse)
      for (auto& q : lambdas.back()) q = -q;
  }
  json data;
  if (in.contains("group")) {
    auto src = to_parhiggs(in);
    data = from_parhiggs(hecke_transform(src, lambdas));
    for (const auto& p : src.punctures)
      if (!p.laurent.empty()) {
        c.warnings.push_back("Laurent data dropped by the data-level transform");
        break;
      }
  } else {
    std::vector<QVec> w;
    for (const auto& x : in.at("weights")) w.push_back(to_qvec(x));
    auto mode = lattice_mode_of(in.value("mode", "GL"));
    auto h = hecke_transform(w, lambdas, to_qvec(in.at("degrees")), mode);
    data = {{"weights", qvecs(h.weights)}, {"degrees", from_qvec(h.degrees)}, {"mode", lattice_mode_name(mode)}};
  }
  data["lambdas"] = in.at("lambdas");
  return {{"data", data}, {"direction", c.inverse ? "inverse" : "forward"}, {"method", "exact rational shift"}};
}

json cmd_gr_res(Context& c) {
  auto r = build_realization(to_group(c.in.at("group")));
  auto p = to_puncture(c.in.at("puncture"));
  auto pc = check_pole_orders(r, p);
  json viol = json::array();
  for (const auto& v : pc.violations)
    viol.push_back({{"order", v.order}, {"mu", from_q(v.mu)}, {"required", v.required}});
  json out = {{"pole_class", tagged(pole_class_name(pc.cls), "exact ad(alpha) eigenvalues")}, {"violations", viol}};
  if (pc.cls == PoleClass::Inadmissible) {
    c.verdict_exit = kNegative;
    return out;
  }
  auto g = gr_res(r, p);
  out["gr_res"] = from_cmat(g.value);
  out["semisimple"] = from_cmat(g.semisimple);
  out["nilpotent"] = from_cmat(g.nilpotent);
  out["ambiguity_active"] = g.ambiguity_active;
  if (g.ambiguity_active) c.warnings.push_back("ad(alpha) has nonzero integer eigenvalues on m^C: GrRes defined up to Ad(exp(t alpha))");
  return out;
}

json triple_json(const SL2Triple& t) {
  return {{"H", from_cmat(t.x)}, {"X", from_cmat(t.e)}, {"Y", from_cmat(t.f)}, {"flavor", flavor_name(t.flavor)}};
}

json certificate_json(const OrbitCertificate& o) {
  return {{"x_invariants", o.x_invariants}, {"rank_sequence", o.rank_sequence}};
}

json cmd_translate_h2l(Context& c) {
  auto r = build_realization(to_group(c.in.at("group")));
  auto conv = to_convention(c.in, MonodromyConvention::RealScale);
  const int n = r.N;
  CMat s = c.in.contains("s") ? to_cmat(c.in.at("s")) : CMat(CMat::Zero(n, n));
  CMat y = c.in.contains("y") ? to_cmat(c.in.at("y")) : CMat(CMat::Zero(n, n));
  auto d = higgs_to_localsystem(r, to_rvec(c.in.at("alpha")), s, y, conv);
  return {{"schema", "dictionary-v1"},
          {"convention", convention_name(conv)},
          {"alpha", from_cmat(d.alpha_matrix)},
          {"s", tagged(from_cmat(d.s), "Kempf-Ness descent")},
          {"beta", from_cmat(d.beta)},
          {"triple", tagged(triple_json(d.triple), "Kostant-Sekiguchi normalization")},
          {"conjugator", from_cmat(d.conjugator)},
          {"monodromy", tagged(from_cmat(d.monodromy), "closed form")},
          {"factors",
           {{"elliptic", from_cmat(d.factors.g_e)},
            {"hyperbolic", from_cmat(d.factors.g_h)},
            {"unipotent", from_cmat(d.factors.g_u)}}},
          {"factor_commutator", max_commutator(d.factors)}};
}

json cmd_translate_l2h(Context& c) {
  auto r = build_realization(to_group(c.in.at("group")));
  auto conv = to_convention(c.in, MonodromyConvention::RealScale);
  CMat beta;
  if (c.in.contains("beta")) beta = to_cmat(c.in.at("beta"));
  auto h = localsystem_to_higgs(r, to_cmat(c.in.at("monodromy")), beta.size() ? &beta : nullptr, conv);
  json spec = json::array();
  for (auto z : h.s_spectrum) spec.push_back(from_cd(z));
  json alpha = json::array();
  for (int k = 0; k < h.alpha_spectrum.size(); ++k) alpha.push_back(h.alpha_spectrum(k));
  // the note is a "; "-terminated list
  for (size_t a = 0, b; (b = h.note.find("; ", a)) != std::string::npos; a = b + 2)
    c.warnings.push_back(h.note.substr(a, b - a));
  return {{"schema", "dictionary-v1"},
          {"convention", convention_name(conv)},
          {"alpha_spectrum", tagged(alpha, "canonical alcove logarithm")},
          {"s", from_cmat(h.s)},
          {"s_spectrum", spec},
          {"nilpotent_log", from_cmat(h.nilpotent_log)},
          {"y_certificate", tagged(certificate_json(h.y_certificate), "Kostant-Sekiguchi map")},
          {"log_branch_ambiguous", h.log_branch_ambiguous}};
}

json cmd_hitchin_section(Context& c) {
  HitchinSectionInput in;
  in.n = c.in.value("n", 2);
  in.genus = c.in.value("genus", 0);
  in.punctures = c.in.value("punctures", 3);
  const std::string lift = c.in.value("lift", "cusp");
  if (lift == "cusp") in.lift = SL2Lift::Cusp;
  else if (lift == "minus_unipotent") in.lift = SL2Lift::MinusUnipotent;
  else throw Error("BadInput", "lift is cusp or minus_unipotent");
  if (c.in.contains("q"))
    for (const auto& t : c.in.at("q")) {
      DifferentialTerm d;
      d.j = t.value("j", 1);
      d.puncture = t.at("puncture").get<int>();
      d.order = t.at("order").get<int>();
      auto z = to_cmat(json::array({json::array({t.at("coeff")})}));
      d.coeff = z(0, 0);
      in.q.push_back(d);
    }
  auto d = hitchin_section(in);
  return {{"data", from_parhiggs(d)}, {"lift", lift_name(in.lift)}};
}

json cmd_toledo(Context& c) {
  auto d = to_parhiggs(c.in);
  return {{"tau", tagged(from_q(toledo_invariant(d)), "2(q pardeg V - p pardeg W)/(p+q)")}};
}

json cmd_mw_check(Context& c) {
  auto d = to_parhiggs(c.in);
  auto m = milnor_wood_check(d);
  if (!m.ok) c.verdict_exit = kNegative;
  return {{"tau", tagged(from_q(m.tau), "2(q pardeg V - p pardeg W)/(p+q)")},
          {"euler", from_q(m.euler)},
          {"rank_plus", tagged(m.rank_plus, "support matching")},
          {"rank_minus", tagged(m.rank_minus, "support matching")},
          {"lower_margin", from_q(m.lower_margin)},
          {"upper_margin", from_q(m.upper_margin)},
          {"ok", m.ok},
          {"violated", m.violated}};
}

LocalModel model_of(const json& j, MonodromyConvention conv) {
  LocalModel m;
  if (j.contains("group")) {
    auto r = build_realization(to_group(j.at("group")));
    const int n = r.N;
    CMat s = j.contains("s") ? to_cmat(j.at("s")) : CMat(CMat::Zero(n, n));
    CMat y = j.contains("y") ? to_cmat(j.at("y")) : CMat(CMat::Zero(n, n));
    m = local_model(higgs_to_localsystem(r, to_rvec(j.at("alpha")), s, y, conv));
  } else {
    m.alpha = to_cmat(j.at("alpha"));
    const int n = static_cast<int>(m.alpha.rows());
    auto get = [&](const char* k) { return j.contains(k) ? to_cmat(j.at(k)) : CMat(CMat::Zero(n, n)); };
    m.s = get("s");
    m.triple = {get("H"), get("X"), get("Y"), Flavor::KSNormal};
    m.psi = CMat::Zero(n, n);
  }
  if (j.contains("psi")) m.psi = to_cmat(j.at("psi"));
  m.psi_order = j.value("psi_order", 1);
  return m;
}

json cmd_verify_model(Context& c) {
  auto conv = to_convention(c.in, MonodromyConvention::RealScale);
  auto m = model_of(c.in, conv);
  RadialGrid g;
  if (c.in.contains("radii")) {
    g.radii = c.in.at("radii").get<std::vector<double>>();
    g.n_theta = c.in.value("n_theta", 64);
  } else {
    g = make_radial_grid(c.in.value("r_max", 1e-2), c.in.value("ratio", 0.1), c.in.value("count", 5),
                         c.in.value("n_theta", 64));
  }
  ResidualOptions ro;
  ro.fd_step = c.in.value("fd_step", ro.fd_step);
  auto prof = hitchin_residual(m, g, ro);
  HolonomyOptions ho;
  ho.convention = conv;
  ho.tolerance = c.tolerance;
  json rows = json::array();
  std::vector<double> dev;
  std::ostringstream csv;
  csv << "r,rho_analytic,rho_fd,holonomy_deviation,literal_deviation\n";
  csv.precision(12);
  for (size_t k = 0; k < g.radii.size(); ++k) {
    auto h = holonomy_check(m, g.radii[k], ho);
    dev.push_back(h.deviation);
    rows.push_back({{"r", g.radii[k]},
                    {"rho_analytic", prof.rho_analytic[k]},
                    {"rho_fd", prof.rho_fd[k]},
                    {"holonomy_deviation", h.deviation},
                    {"literal_deviation", h.literal_deviation},
                    {"rk4_steps", h.steps}});
    csv << g.radii[k] << ',' << prof.rho_analytic[k] << ',' << prof.rho_fd[k] << ',' << h.deviation << ','
        << h.literal_deviation << '\n';
  }
  c.csv_text = csv.str();
  json out = {{"convention", convention_name(conv)},
              {"table", tagged(rows, "analytic curvature, central differences, RK4 with Richardson control")},
              {"fd_gap", prof.max_gap}};
  if (g.radii.size() >= 2) {
    auto fit = fit_inverse_log(g.radii, dev);
    out["decay_fit"] = tagged(json{{"C", fit.C}, {"r2", fit.r2}}, "least squares C/|ln r|");
  }
  return out;
}

const std::map<std::string, std::pair<Command, std::string>>& commands() {
  static const std::map<std::string, std::pair<Command, std::string>> m = {
      {"rootsys", {cmd_rootsys, "root datum of a classical type"}},
      {"alcove-normalize", {cmd_alcove_normalize, "k and lattice shift bringing k*a into A'"}},
      {"parabolic", {cmd_parabolic, "parabolic subalgebra of an element s"}},
      {"degree-relative", {cmd_degree_relative, "relative degree mu_s(sigma)"}},
      {"degree-parabolic", {cmd_degree_parabolic, "parabolic degree of a flag reduction"}},
      {"stability", {cmd_stability, "stability verdict for parhiggs-v1 data"}},
      {"genericity", {cmd_genericity, "genericity of parabolic weights"}},
      {"hecke", {cmd_hecke, "Hecke shift of weights and degrees"}},
      {"gr-res", {cmd_gr_res, "pole orders and graded residue at a marked point"}},
      {"translate-h2l", {cmd_translate_h2l, "Higgs data to local-system data"}},
      {"translate-l2h", {cmd_translate_l2h, "local-system data to Higgs data"}},
      {"hitchin-section", {cmd_hitchin_section, "Hitchin-section data for SL(n,R)"}},
      {"toledo", {cmd_toledo, "Toledo invariant"}},
      {"mw-check", {cmd_mw_check, "Milnor-Wood inequality"}},
      {"verify-model", {cmd_verify_model, "residual and holonomy table of the local model"}},
  };
  return m;
}

json header(const std::string& name, const Context& c) {
  return {{"tool", "phb"},
          {"command", name},
          {"input_digest", digest(c.in)},
          {"seed", c.seed},
          {"tolerance", c.tolerance},
          {"conventions",
           {{"alcove", "0 <= a(x) <= 1 for every positive root a"},
            {"monodromy", convention_name(to_convention(c.in, MonodromyConvention::RealScale)) +
                              " (default real-scale)"},
            {"toledo", "2(q pardeg V - p pardeg W)/(p+q), V the first p summands"},
            {"pardeg", "deg - sum of weights per summand"}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"phb: parabolic Higgs bundle toolkit"};
  app.require_subcommand(1, 1);
  std::string input, output;
  Context ctx;
  for (const auto& [name, entry] : commands()) {
    auto* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--input", input, "JSON input file (default stdin)");
    sub->add_option("--output", output, "report file (default stdout)");
    sub->add_option("--seed", ctx.seed, "seed echoed in the report");
    sub->add_option("--tolerance", ctx.tolerance, "numerical tolerance");
    if (name == "hecke") sub->add_flag("--inverse", ctx.inverse, "apply -lambda");
    if (name == "verify-model") sub->add_flag("--csv", ctx.csv, "write the residual table as CSV");
  }
  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  json report;
  int code = kOk;
  try {
    std::string text;
    if (input.empty()) {
      std::ostringstream ss;
      ss << std::cin.rdbuf();
      text = ss.str();
    } else {
      std::ifstream f(input);
      if (!f) throw Error("BadInput", "cannot open " + input);
      std::ostringstream ss;
      ss << f.rdbuf();
      text = ss.str();
    }
    try {
      ctx.in = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error("MalformedJSON", std::string(e.what()) + " (byte " + std::to_string(e.byte) + ")");
    }
    report["header"] = header(name, ctx);
    report["outputs"] = commands().at(name).first(ctx);
    code = ctx.verdict_exit;
  } catch (const Error& e) {
    code = e.error_class() == ErrorClass::Precondition ? kPrecondition : kConvergence;
    report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
  } catch (const json::exception& e) {
    code = kPrecondition;
    report["error"] = {{"kind", "BadInput"}, {"message", e.what()}};
  } catch (const std::exception& e) {
    code = kConvergence;
    report["error"] = {{"kind", "Failure"}, {"message", e.what()}};
  }
  if (!report.contains("header")) report["header"] = {{"tool", "phb"}, {"command", name}};
  report["warnings"] = ctx.warnings;
  report["exit_code"] = code;
  if (report.contains("error")) std::cerr << "phb: " << report["error"]["message"].get<std::string>() << '\n';

  const std::string body = (ctx.csv && code == kOk) ? ctx.csv_text : report.dump(2) + "\n";
  if (output.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(output);
    f << body;
  }
  return code;
}
