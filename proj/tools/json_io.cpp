#include "json_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

namespace phb::io {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error("BadInput", what); }

double clean(double v) { return std::abs(v) < 1e-13 ? 0.0 : v; }

cd to_entry(const json& e) {
  if (e.is_array()) {
    if (e.size() != 2) bad("complex entries are [re, im] pairs");
    return {to_double(to_q(e[0])), to_double(to_q(e[1]))};
  }
  return {to_double(to_q(e)), 0.0};
}

}  // namespace

Q to_q(const json& j) {
  if (j.is_number_integer()) return Q(j.get<std::int64_t>());
  if (j.is_number_float()) return parse_rational(j.dump());
  if (j.is_string()) return parse_rational(j.get<std::string>());
  bad("expected a rational, got " + j.dump());
}

json from_q(const Q& q) { return format_rational(q); }

QVec to_qvec(const json& j) {
  if (!j.is_array()) bad("expected an array of rationals");
  QVec v;
  for (const auto& e : j) v.push_back(to_q(e));
  return v;
}

json from_qvec(const QVec& v) {
  json a = json::array();
  for (const auto& q : v) a.push_back(from_q(q));
  return a;
}

QMat to_qmat(const json& j) {
  if (!j.is_array()) bad("expected an array of rows");
  QMat m;
  for (const auto& row : j) m.push_back(to_qvec(row));
  for (const auto& row : m)
    if (row.size() != m[0].size()) bad("ragged matrix");
  return m;
}

json from_qmat(const QMat& m) {
  json a = json::array();
  for (const auto& row : m) a.push_back(from_qvec(row));
  return a;
}

RVec to_rvec(const json& j) {
  QVec q = to_qvec(j);
  RVec v(q.size());
  for (size_t k = 0; k < q.size(); ++k) v(k) = to_double(q[k]);
  return v;
}

CMat to_cmat(const json& j) {
  if (j.is_object()) {
    if (!j.contains("re")) bad("complex matrix object needs \"re\"");
    CMat re = to_cmat(j.at("re"));
    if (!j.contains("im")) return re;
    CMat im = to_cmat(j.at("im"));
    if (im.rows() != re.rows() || im.cols() != re.cols()) bad("re and im shapes differ");
    return re + cd(0, 1) * im;
  }
  if (!j.is_array() || j.empty() || !j[0].is_array()) bad("expected a matrix");
  const int rows = static_cast<int>(j.size()), cols = static_cast<int>(j[0].size());
  CMat m(rows, cols);
  for (int a = 0; a < rows; ++a) {
    if (static_cast<int>(j[a].size()) != cols) bad("ragged matrix");
    for (int b = 0; b < cols; ++b) m(a, b) = to_entry(j[a][b]);
  }
  return m;
}

json from_cmat(const CMat& m) {
  json re = json::array(), im = json::array();
  for (int a = 0; a < m.rows(); ++a) {
    json r = json::array(), i = json::array();
    for (int b = 0; b < m.cols(); ++b) r.push_back(clean(m(a, b).real())), i.push_back(clean(m(a, b).imag()));
    re.push_back(r), im.push_back(i);
  }
  return {{"re", re}, {"im", im}};
}

json from_cd(cd z) { return {{"re", clean(z.real())}, {"im", clean(z.imag())}}; }

RealizationSpec to_group(const json& j) {
  RealizationSpec g;
  const std::string t = j.at("type").get<std::string>();
  if (t == "GLC") g.group = Group::GLC;
  else if (t == "SLC") g.group = Group::SLC;
  else if (t == "U") g.group = Group::U;
  else if (t == "SU") g.group = Group::SU;
  else if (t == "SLR") g.group = Group::SLR;
  else if (t == "SUpq") g.group = Group::SUpq;
  else bad("unknown group type " + t);
  if (g.group == Group::SUpq) {
    g.p = j.at("p").get<int>(), g.q = j.at("q").get<int>();
    g.n = g.p + g.q;
  } else {
    g.n = j.at("n").get<int>();
  }
  const std::string model = j.value("model", "standard");
  if (model == "standard") g.model = Model::Standard;
  else if (model == "split") g.model = Model::SplitDiagonal;
  else bad("model is \"standard\" or \"split\"");
  return g;
}

json from_group(const RealizationSpec& g) {
  static const char* names[] = {"GLC", "SLC", "U", "SU", "SLR", "SUpq"};
  json j = {{"type", names[static_cast<int>(g.group)]}, {"n", g.n}};
  if (g.group == Group::SUpq) j["p"] = g.p, j["q"] = g.q;
  if (g.group == Group::SLR) j["model"] = g.model == Model::Standard ? "standard" : "split";
  return j;
}

PunctureData to_puncture(const json& j) {
  PunctureData p;
  p.weight = to_qvec(j.at("weight"));
  if (j.contains("laurent"))
    for (const auto& t : j.at("laurent")) p.laurent.push_back({t.at("order").get<int>(), to_cmat(t.at("matrix"))});
  return p;
}

json from_puncture(const PunctureData& p) {
  json l = json::array();
  for (const auto& t : p.laurent) l.push_back({{"order", t.order}, {"matrix", from_cmat(t.matrix)}});
  return {{"weight", from_qvec(p.weight)}, {"laurent", l}};
}

ParabolicHiggsData to_parhiggs(const json& j) {
  if (j.contains("schema") && j.at("schema") != "parhiggs-v1") bad("expected schema parhiggs-v1");
  ParabolicHiggsData d;
  d.genus = j.value("genus", 0);
  d.group = to_group(j.at("group"));
  d.degrees = to_qvec(j.at("degrees"));
  for (const auto& p : j.at("punctures")) d.punctures.push_back(to_puncture(p));
  if (j.contains("support")) d.support = j.at("support").get<std::vector<std::vector<bool>>>();
  if (j.contains("c")) d.c = to_qvec(j.at("c"));
  return d;
}

json from_parhiggs(const ParabolicHiggsData& d) {
  json p = json::array();
  for (const auto& x : d.punctures) p.push_back(from_puncture(x));
  json j = {{"schema", "parhiggs-v1"},
            {"genus", d.genus},
            {"group", from_group(d.group)},
            {"degrees", from_qvec(d.degrees)},
            {"punctures", p}};
  if (!d.support.empty()) j["support"] = d.support;
  if (!d.c.empty()) j["c"] = from_qvec(d.c);
  return j;
}

WeightedFlag to_flag(const json& j) {
  WeightedFlag f;
  f.weights = to_qvec(j.at("weights"));
  f.dims = j.at("dims").get<std::vector<int>>();
  if (j.contains("basis")) {
    f.basis = to_qmat(j.at("basis"));
  } else {
    const int n = f.dims.empty() ? 0 : f.dims.back();
    f.basis.assign(n, QVec(n, Q(0)));
    for (int k = 0; k < n; ++k) f.basis[k][k] = 1;
  }
  validate_flag(f);
  return f;
}

MonodromyConvention to_convention(const json& j, MonodromyConvention fallback) {
  if (!j.contains("convention")) return fallback;
  return parse_convention(j.at("convention").get<std::string>());
}

std::string digest(const json& j) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : j.dump()) h = (h ^ c) * 1099511628211ull;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace phb::io
