#include "phb/parhiggs.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

#include "phb/parabolic.hpp"

namespace phb {

namespace {

// -floor(-mu)
int ceil_q(const Q& mu) { return static_cast<int>(-floor_q(-mu)); }

void require_frame_identity(const ReductiveRealization& r) {
  if (r.spec.group == Group::SLR && r.spec.model == Model::Standard)
    throw Error("UnsupportedGroup", "desk data needs a realization with diagonal torus; use the split-diagonal model");
}

}  // namespace

std::vector<EigenComponent> eigen_components(const ReductiveRealization& r, const QVec& alpha, const CMat& x,
                                             Target target) {
  if (static_cast<int>(alpha.size()) != r.N) throw Error("MissingEigenbasis", "weight has the wrong length");
  CMat a = torus_element_q(r, alpha);
  std::set<Q> exact;
  for (const auto& p : alpha)
    for (const auto& q : alpha) exact.insert(p - q);
  auto spaces = eigen_split(r, a, target);
  std::vector<EigenComponent> out;
  CMat rest = x;
  for (const auto& sp : spaces) {
    CMat comp = r.project(sp.basis, x);
    rest -= comp;
    if (comp.norm() < 1e-13 * std::max(1.0, x.norm())) continue;
    const Q* best = nullptr;
    double dist = 1e300;
    for (const auto& e : exact) {
      double d = std::abs(to_double(e) - sp.mu);
      if (d < dist) dist = d, best = &e;
    }
    if (!best || dist > 1e-8) throw Error("MissingEigenbasis", "eigenvalue does not match the exact table");
    out.push_back({*best, comp});
  }
  if (rest.norm() > 1e-9 * std::max(1.0, x.norm()))
    throw Error("MissingEigenbasis", "matrix does not lie in the target space");
  return out;
}

std::string pole_class_name(PoleClass p) {
  switch (p) {
    case PoleClass::Parabolic:
      return "parabolic";
    case PoleClass::StrictlyParabolic:
      return "strictly_parabolic";
    default:
      return "inadmissible";
  }
}

PoleCheck check_pole_orders(const ReductiveRealization& r, const PunctureData& p) {
  PoleCheck pc{PoleClass::StrictlyParabolic, {}};
  for (const auto& t : p.laurent) {
    for (const auto& comp : eigen_components(r, p.weight, t.matrix, Target::mC)) {
      int req = ceil_q(comp.mu);
      if (t.order < req) {
        pc.violations.push_back({t.order, comp.mu, req});
      } else if (t.order == req && pc.cls == PoleClass::StrictlyParabolic) {
        pc.cls = PoleClass::Parabolic;
      }
    }
  }
  if (!pc.violations.empty()) pc.cls = PoleClass::Inadmissible;
  return pc;
}

GrRes gr_res(const ReductiveRealization& r, const PunctureData& p) {
  auto pc = check_pole_orders(r, p);
  if (pc.cls == PoleClass::Inadmissible) throw Error("InadmissiblePoles", "Higgs field violates the pole bounds");
  GrRes g;
  g.value = CMat::Zero(r.N, r.N);
  for (const auto& t : p.laurent)
    for (const auto& comp : eigen_components(r, p.weight, t.matrix, Target::mC))
      if (is_integer(comp.mu) && t.order == ceil_q(comp.mu)) g.value += comp.matrix;
  auto aj = jordan_additive(g.value);
  g.semisimple = aj.semisimple;
  g.nilpotent = aj.nilpotent;
  g.torus_generator = p.weight;
  g.ambiguity_active = false;
  for (const auto& sp : eigen_split(r, torus_element_q(r, p.weight), Target::mC))
    if (sp.mu != 0.0 && std::abs(sp.mu - std::round(sp.mu)) < 1e-9) g.ambiguity_active = true;
  return g;
}

GaugeCheck is_parabolic_gauge(const ReductiveRealization& r, const std::vector<LaurentTerm>& g, const QVec& alpha) {
  GaugeCheck gc{true, {}};
  const bool traceless = r.traceless;
  for (const auto& t : g) {
    // the identity part of a group element is not in sl_N; split it off
    CMat m = t.matrix;
    CMat central = CMat::Zero(r.N, r.N);
    if (traceless) {
      central = (m.trace() / double(r.N)) * CMat::Identity(r.N, r.N);
      m -= central;
    }
    auto comps = eigen_components(r, alpha, m, Target::gC);
    if (central.norm() > 0) comps.push_back({Q(0), central});
    for (const auto& c : comps) {
      // |z|^{-lambda} z^k bounded iff k - lambda >= 0
      if (Q(t.order) - c.mu < 0) {
        gc.bounded = false;
        gc.failures.push_back({t.order, c.mu, ceil_q(c.mu)});
      }
    }
  }
  return gc;
}

std::vector<LaurentTerm> exp_over_z(const CMat& n) {
  if (!is_nilpotent(n)) throw Error("NotNilpotent", "exp(n/z) expansion needs nilpotent n");
  std::vector<LaurentTerm> out;
  CMat p = CMat::Identity(n.rows(), n.cols());
  double fact = 1;
  for (int k = 0; k <= n.rows(); ++k) {
    if (k > 0) {
      p = p * n;
      fact *= k;
    }
    if (p.norm() < 1e-14) break;
    out.push_back({-k, p / fact});
  }
  return out;
}

std::vector<std::vector<bool>> effective_support(const ParabolicHiggsData& d) {
  const int n = d.rank();
  if (!d.support.empty()) {
    if (static_cast<int>(d.support.size()) != n) throw Error("DimensionMismatch", "support has the wrong size");
    return d.support;
  }
  std::vector<std::vector<bool>> s(n, std::vector<bool>(n, false));
  for (const auto& p : d.punctures)
    for (const auto& t : p.laurent)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (std::abs(t.matrix(i, j)) > 1e-14) s[i][j] = true;
  return s;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Stable:
      return "stable";
    case Verdict::StrictlySemistable:
      return "strictly_semistable";
    case Verdict::Polystable:
      return "polystable";
    default:
      return "unstable";
  }
}

namespace {

// Fibre basis putting `subset` first, in the summand basis.
QMat adapted_basis(int n, const std::vector<int>& first, const std::vector<int>& rest) {
  QMat b(n, QVec(n, Q(0)));
  int col = 0;
  for (int k : first) b[k][col++] = 1;
  for (int k : rest) b[k][col++] = 1;
  return b;
}

WeightedFlag diagonal_weight_flag(const QVec& w) {
  const int n = static_cast<int>(w.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return w[a] < w[b]; });
  WeightedFlag f;
  f.basis = adapted_basis(n, idx, {});
  for (int k = 0; k < n; ++k) {
    if (k + 1 == n || w[idx[k + 1]] != w[idx[k]]) {
      f.dims.push_back(k + 1);
      f.weights.push_back(w[idx[k]]);
    }
  }
  return f;
}

QVec default_character(int n, const std::vector<int>& subset) {
  const int r = static_cast<int>(subset.size());
  QVec s(n, Q(r));
  for (int k : subset) s[k] = -(n - r);
  return s;
}

std::vector<int> complement(int n, const std::vector<int>& subset) {
  std::vector<int> out;
  for (int k = 0; k < n; ++k)
    if (std::find(subset.begin(), subset.end(), k) == subset.end()) out.push_back(k);
  return out;
}

bool invariant(const std::vector<std::vector<bool>>& sup, const std::vector<int>& subset, const std::vector<int>& rest) {
  for (int k : subset)
    for (int j : rest)
      if (sup[j][k]) return false;
  return true;
}

bool splits(const std::vector<std::vector<bool>>& sup, const std::vector<int>& subset, const std::vector<int>& rest) {
  return invariant(sup, subset, rest) && invariant(sup, rest, subset);
}

std::string subset_id(const std::vector<int>& s) {
  std::string id = "E{";
  for (size_t k = 0; k < s.size(); ++k) id += (k ? "," : "") + std::to_string(s[k] + 1);
  return id + "}";
}

std::string character_id(const QVec& s) {
  std::string id = "diag(";
  for (size_t k = 0; k < s.size(); ++k) id += (k ? "," : "") + format_rational(s[k]);
  return id + ")";
}

ParabolicHiggsData restrict_to(const ParabolicHiggsData& d, const std::vector<int>& idx) {
  ParabolicHiggsData out;
  out.genus = d.genus;
  out.group = {Group::GLC, static_cast<int>(idx.size())};
  auto sup = effective_support(d);
  for (int k : idx) out.degrees.push_back(d.degrees[k]);
  for (const auto& p : d.punctures) {
    PunctureData q;
    for (int k : idx) q.weight.push_back(p.weight[k]);
    out.punctures.push_back(q);
  }
  out.support.assign(idx.size(), std::vector<bool>(idx.size()));
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = 0; b < idx.size(); ++b) out.support[a][b] = sup[idx[a]][idx[b]];
  if (!d.c.empty())
    for (int k : idx) out.c.push_back(d.c[k]);
  return out;
}

Q pairing_c(const ParabolicHiggsData& d, const QVec& s) {
  Q v = 0;
  if (d.c.empty()) return v;
  for (size_t k = 0; k < s.size(); ++k) v += d.c[k] * s[k];
  return v;
}

}  // namespace

Q subset_pardeg(const ParabolicHiggsData& d, const std::vector<int>& subset, const QVec& s) {
  const int n = d.rank();
  auto rest = complement(n, subset);
  // graded pieces of the two-step (or finer) filtration given by the eigenvalues of s
  std::vector<int> order(subset);
  order.insert(order.end(), rest.begin(), rest.end());
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[a] < s[b]; });
  FlagReduction red;
  for (int k = 0; k < n; ++k) {
    if (k == 0 || s[order[k]] != s[order[k - 1]]) {
      red.ranks.push_back(0);
      red.degrees.push_back(Q(0));
      red.character.push_back(s[order[k]]);
    }
    red.ranks.back() += 1;
    red.degrees.back() += d.degrees[order[k]];
  }
  std::vector<WeightedFlag> alphas;
  for (const auto& p : d.punctures) {
    if (static_cast<int>(p.weight.size()) != n) throw Error("DimensionMismatch", "weight length differs from rank");
    alphas.push_back(diagonal_weight_flag(p.weight));
    red.fibre_bases.push_back(adapted_basis(n, order, {}));
  }
  return parabolic_degree(alphas, red).total;
}

namespace {

struct Evaluation {
  std::vector<SlopeEntry> table;
  std::vector<std::vector<int>> subsets;  // aligned with table
};

Evaluation evaluate(const ParabolicHiggsData& d, const std::vector<CandidateReduction>& cands) {
  Evaluation ev;
  for (const auto& c : cands) {
    if (!c.phi_compatible) continue;
    QVec s = c.character.empty() ? default_character(d.rank(), c.subset) : c.character;
    Q pd = subset_pardeg(d, c.subset, s);
    ev.table.push_back({c.id.empty() ? subset_id(c.subset) : c.id, character_id(s), pd, pd - pairing_c(d, s)});
    ev.subsets.push_back(c.subset);
  }
  return ev;
}

std::vector<CandidateReduction> invariant_subsets(const ParabolicHiggsData& d) {
  const int n = d.rank();
  auto sup = effective_support(d);
  std::vector<CandidateReduction> out;
  for (unsigned mask = 1; mask + 1 < (1u << n); ++mask) {
    std::vector<int> sub;
    for (int k = 0; k < n; ++k)
      if (mask & (1u << k)) sub.push_back(k);
    if (!invariant(sup, sub, complement(n, sub))) continue;
    out.push_back({subset_id(sub), sub, {}, true});
  }
  return out;
}

bool rank_two_kernel_complete(const ParabolicHiggsData& d) {
  if (d.rank() != 2) return false;
  auto sup = effective_support(d);
  int offdiag = int(sup[0][1]) + int(sup[1][0]);
  return offdiag == 1 && !sup[0][0] && !sup[1][1];
}

StabilityVerdict classify(const ParabolicHiggsData& d, const Evaluation& ev, int depth);

bool polystable_pieces(const ParabolicHiggsData& d, const std::vector<int>& subset, int depth) {
  auto sup = effective_support(d);
  auto rest = complement(d.rank(), subset);
  if (!splits(sup, subset, rest)) return false;
  if (depth > 6) return false;
  for (const auto& piece : {subset, rest}) {
    if (piece.size() <= 1) continue;
    auto sub = restrict_to(d, piece);
    auto v = classify(sub, evaluate(sub, invariant_subsets(sub)), depth + 1);
    if (v.verdict == Verdict::Unstable || v.verdict == Verdict::StrictlySemistable) return false;
  }
  return true;
}

StabilityVerdict classify(const ParabolicHiggsData& d, const Evaluation& ev, int depth) {
  StabilityVerdict v;
  v.slope_table = ev.table;
  if (ev.table.empty()) {
    v.verdict = Verdict::Stable;
    return v;
  }
  size_t arg = 0;
  for (size_t k = 1; k < ev.table.size(); ++k)
    if (ev.table[k].slope < ev.table[arg].slope) arg = k;
  v.witness = ev.table[arg];
  const Q& m = ev.table[arg].slope;
  if (m > 0) {
    v.verdict = Verdict::Stable;
  } else if (m < 0) {
    v.verdict = Verdict::Unstable;
  } else {
    bool poly = true;
    for (size_t k = 0; k < ev.table.size() && poly; ++k)
      if (ev.table[k].slope == 0) poly = polystable_pieces(d, ev.subsets[k], depth);
    v.verdict = poly ? Verdict::Polystable : Verdict::StrictlySemistable;
  }
  return v;
}

// Rank 2, phi = 0, genus 0: line subbundles of degree e whose fibres meet the
// small-weight line at the marked points in T and are generic elsewhere.
void degree_sweep(const ParabolicHiggsData& d, int depth, Evaluation& ev) {
  const Q d1 = d.degrees[0], d2 = d.degrees[1];
  if (!is_integer(d1) || !is_integer(d2)) return;
  const long top = static_cast<long>(std::max(d1, d2));
  const size_t np = d.punctures.size();
  if (np > 12) return;
  for (long e = top; e > top - depth; --e) {
    long dim = static_cast<long>(d1 - e + 1) + static_cast<long>(d2 - e + 1);
    if (d1 - e < 0 || d2 - e < 0) continue;  // only lines mapping to both summands
    for (unsigned mask = 0; mask < (1u << np); ++mask) {
      long t = __builtin_popcount(mask);
      if (dim - t < 2) continue;
      Q local = 0;
      for (size_t i = 0; i < np; ++i) {
        const auto& w = d.punctures[i].weight;
        Q lo = std::min(w[0], w[1]), hi = std::max(w[0], w[1]);
        // s = diag(-1 on M, 1 on quotient)
        local += (mask & (1u << i)) ? (hi - lo) : (lo - hi);
      }
      Q global = -Q(e) + (d1 + d2 - Q(e));
      Q pd = global - local;
      std::string id = "line(deg=" + std::to_string(e) + ",special=" + std::to_string(t) + ")";
      ev.table.push_back({id, "diag(-1,1)", pd, pd});
      ev.subsets.push_back({});
    }
  }
}

}  // namespace

StabilityVerdict stability_check(const ParabolicHiggsData& d, const StabilityOptions& opt) {
  auto r = build_realization(d.group);
  require_frame_identity(r);
  if (d.rank() != r.N) throw Error("DimensionMismatch", "degree list length differs from the realization size");
  for (const auto& p : d.punctures)
    if (check_pole_orders(r, p).cls == PoleClass::Inadmissible)
      throw Error("InadmissiblePoles", "Higgs field violates the pole bounds");
  StabilityVerdict v;
  if (!opt.exhaustive) {
    for (const auto& c : opt.certificate)
      for (int k : c.subset)
        if (k < 0 || k >= d.rank()) throw Error("DimensionMismatch", "candidate subset index out of range");
    v = classify(d, evaluate(d, opt.certificate), 0);
    v.complete = false;
    v.search_bound = static_cast<int>(opt.certificate.size());
    v.note = "verdict relative to the supplied certificate";
    return v;
  }
  if (d.rank() > 3) throw Error("EnumerationBound", "exhaustive mode supports rank <= 3", ErrorClass::Convergence);
  auto cands = invariant_subsets(d);
  Evaluation ev = evaluate(d, cands);
  auto sup = effective_support(d);
  bool phi_zero = true;
  for (const auto& row : sup)
    for (bool b : row) phi_zero = phi_zero && !b;
  const bool sweep = d.rank() == 2 && phi_zero && d.genus == 0;
  if (sweep) degree_sweep(d, opt.degree_sweep, ev);
  v = classify(d, ev, 0);
  v.search_bound = static_cast<int>(ev.table.size());
  v.complete = d.rank() == 1 || rank_two_kernel_complete(d);
  if (v.complete) {
    v.note = "every phi-invariant subbundle was checked";
  } else if (v.verdict != Verdict::Unstable) {
    v.note = "no destabilizer found up to bound";
  } else {
    v.note = "destabilizing witness found";
  }
  return v;
}

LatticeMode lattice_mode_for(const RealizationSpec& g) {
  switch (g.group) {
    case Group::GLC:
    case Group::U:
      return LatticeMode::GL;
    default:
      return LatticeMode::SL;
  }
}

bool in_cochar_lattice(LatticeMode m, const QVec& l) {
  switch (m) {
    case LatticeMode::GL:
      return std::all_of(l.begin(), l.end(), [](const Q& x) { return is_integer(x); });
    case LatticeMode::SL: {
      Q sum = 0;
      for (const auto& x : l) {
        if (!is_integer(x)) return false;
        sum += x;
      }
      return sum == 0;
    }
    case LatticeMode::PGL: {
      Q sum = 0;
      for (const auto& x : l) sum += x;
      if (sum != 0) return false;
      for (size_t k = 1; k < l.size(); ++k)
        if (!is_integer(l[k] - l[0])) return false;
      return true;
    }
  }
  return false;
}

HeckeResult hecke_transform(const std::vector<QVec>& weights, const std::vector<QVec>& lambdas, const QVec& degrees,
                            LatticeMode mode) {
  if (weights.size() != lambdas.size()) throw Error("DimensionMismatch", "one lattice vector per marked point");
  HeckeResult out{weights, degrees};
  for (size_t j = 0; j < weights.size(); ++j) {
    if (lambdas[j].size() != weights[j].size() || weights[j].size() != degrees.size())
      throw Error("DimensionMismatch", "lattice vector length differs from rank");
    if (!in_cochar_lattice(mode, lambdas[j])) throw Error("NotInLattice", "shift is not a cocharacter");
    for (size_t k = 0; k < degrees.size(); ++k) {
      out.weights[j][k] += lambdas[j][k];
      out.degrees[k] += lambdas[j][k];
    }
  }
  return out;
}

ParabolicHiggsData hecke_transform(const ParabolicHiggsData& d, const std::vector<QVec>& lambdas) {
  std::vector<QVec> w;
  for (const auto& p : d.punctures) w.push_back(p.weight);
  auto h = hecke_transform(w, lambdas, d.degrees, lattice_mode_for(d.group));
  ParabolicHiggsData out = d;
  out.degrees = h.degrees;
  // Laurent data is not transported; the global support pattern is kept.
  for (size_t j = 0; j < w.size(); ++j) {
    out.punctures[j].weight = h.weights[j];
    out.punctures[j].laurent.clear();
  }
  out.support = effective_support(d);
  return out;
}

namespace {

std::vector<std::vector<int>> combinations(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == r) {
      out.push_back(cur);
      return;
    }
    for (int k = start; k < n; ++k) {
      cur.push_back(k);
      rec(k + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

Q frac_part(const Q& x) { return x - floor_q(x); }

}  // namespace

GenericityResult genericity_check(const std::vector<QVec>& weights, bool include_determinant) {
  GenericityResult res;
  if (weights.empty()) {
    res.generic = false;
    res.character = "none (no marked points: every sum is 0)";
    res.value = 0;
    return res;
  }
  const int n = static_cast<int>(weights[0].size());
  for (const auto& w : weights)
    if (static_cast<int>(w.size()) != n) throw Error("DimensionMismatch", "weights of different lengths");
  if (include_determinant) {
    Q total = 0;
    for (const auto& w : weights)
      for (const auto& x : w) total += x;
    if (is_integer(total)) {
      res.generic = false;
      res.character = "determinant";
      res.value = total;
      return res;
    }
  }
  for (int r = 1; r < n; ++r) {
    int g = std::gcd(n - r, r);
    auto combos = combinations(n, r);
    // sums mod 1 reachable so far, with the coordinates that realize them
    std::map<Q, std::pair<Q, std::vector<std::vector<int>>>> reach;
    reach[Q(0)] = {Q(0), {}};
    for (const auto& w : weights) {
      std::map<Q, std::pair<Q, std::vector<std::vector<int>>>> next;
      for (const auto& [key, val] : reach)
        for (const auto& I : combos) {
          Q v = 0;
          for (int k = 0; k < n; ++k) {
            bool in = std::find(I.begin(), I.end(), k) != I.end();
            v += (in ? Q(-(n - r), g) : Q(r, g)) * w[k];
          }
          Q tot = val.first + v;
          Q f = frac_part(tot);
          if (next.count(f)) continue;
          auto pos = val.second;
          pos.push_back(I);
          next[f] = {tot, pos};
        }
      reach.swap(next);
    }
    auto it = reach.find(Q(0));
    if (it != reach.end()) {
      res.generic = false;
      res.character = "maximal parabolic, rank " + std::to_string(r) + " subspace";
      res.value = it->second.first;
      res.positions = it->second.second;
      return res;
    }
  }
  return res;
}

}  // namespace phb
