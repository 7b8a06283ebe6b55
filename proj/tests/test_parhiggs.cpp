#include <doctest.h>

#include <map>
#include <random>

#include "phb/parhiggs.hpp"

using namespace phb;

namespace {

CMat E(int n, int i, int j) {
  CMat m = CMat::Zero(n, n);
  m(i, j) = 1;
  return m;
}

RealizationSpec split_sl2r() {
  RealizationSpec g;
  g.group = Group::SLR;
  g.n = 2;
  g.model = Model::SplitDiagonal;
  return g;
}

RealizationSpec complex_group(Group grp, int n) {
  RealizationSpec g;
  g.group = grp;
  g.n = n;
  return g;
}

// L = K^{1/2} on P^1 with three marked points, basis (L^{-1}, L).
ParabolicHiggsData uniformizing_instance() {
  ParabolicHiggsData d;
  d.genus = 0;
  d.group = split_sl2r();
  d.degrees = {Q(1), Q(-1)};
  for (int k = 0; k < 3; ++k) d.punctures.push_back({{Q(1, 2), Q(-1, 2)}, {{1, E(2, 0, 1)}}});
  return d;
}

using Series = std::map<int, CMat>;

Series to_series(const std::vector<LaurentTerm>& t) {
  Series s;
  for (const auto& x : t) {
    if (s.count(x.order))
      s[x.order] += x.matrix;
    else
      s[x.order] = x.matrix;
  }
  return s;
}

Series mul(const Series& a, const Series& b) {
  Series out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) {
      CMat p = x * y;
      if (out.count(i + j))
        out[i + j] += p;
      else
        out[i + j] = p;
    }
  return out;
}

std::vector<LaurentTerm> to_terms(const Series& s) {
  std::vector<LaurentTerm> out;
  for (const auto& [k, m] : s)
    if (m.norm() > 1e-13) out.push_back({k, m});
  return out;
}

std::vector<double> sorted_real_spectrum(const CMat& a) {
  Eigen::ComplexEigenSolver<CMat> es(a);
  std::vector<double> v;
  for (int k = 0; k < a.rows(); ++k) v.push_back(es.eigenvalues()(k).real());
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<int> rank_sequence(const CMat& n) {
  std::vector<int> out;
  CMat p = n;
  for (int k = 0; k < n.rows(); ++k) {
    out.push_back(numeric_rank(p, 1e-8));
    p = p * n;
  }
  return out;
}

}  // namespace

TEST_CASE("pole orders in the alpha = 1/2 picture") {
  auto r = build_realization(split_sl2r());
  QVec alpha{Q(1, 2), Q(-1, 2)};
  PunctureData p{alpha, {{1, 3.0 * E(2, 0, 1)}, {-1, 2.0 * E(2, 1, 0)}}};
  auto pc = check_pole_orders(r, p);
  CHECK(pc.cls == PoleClass::Parabolic);
  CHECK(pc.violations.empty());

  auto g = gr_res(r, p);
  CMat expect = 3.0 * E(2, 0, 1) + 2.0 * E(2, 1, 0);
  CHECK((g.value - expect).norm() < 1e-12);
  CHECK((g.semisimple + g.nilpotent - g.value).norm() < 1e-10);
  CHECK(g.nilpotent.norm() < 1e-8);  // 6 > 0: semisimple
  CHECK(g.ambiguity_active);

  PunctureData zero{alpha, {}};
  CHECK(check_pole_orders(r, zero).cls == PoleClass::StrictlyParabolic);

  PunctureData bad{alpha, {{-2, E(2, 1, 0)}}};
  auto pb = check_pole_orders(r, bad);
  REQUIRE(pb.cls == PoleClass::Inadmissible);
  REQUIRE(pb.violations.size() == 1);
  CHECK(pb.violations[0].mu == Q(-1));
  CHECK(pb.violations[0].order == -2);
  CHECK(pb.violations[0].required == -1);
  CHECK_THROWS_AS(gr_res(r, bad), Error);

  QVec wrong{Q(1, 2), Q(1, 2)};  // not a torus coordinate of the split model
  CHECK_THROWS_AS(check_pole_orders(r, PunctureData{wrong, {{0, E(2, 0, 1)}}}), Error);
}

TEST_CASE("graded residue for an interior weight is the Levi part of the residue") {
  auto r = build_realization(complex_group(Group::SLC, 3));
  QVec alpha{Q(1, 3), Q(0), Q(-1, 3)};
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  CMat res(3, 3);
  for (int k = 0; k < 9; ++k) res.data()[k] = cd(nd(rng), nd(rng));
  res -= (res.trace() / 3.0) * CMat::Identity(3, 3);
  PunctureData p{alpha, {{0, res}, {1, res * res - (res * res).trace() / 3.0 * CMat::Identity(3, 3)}}};
  // off-diagonal entries with mu > 0 at order 0 break the bound
  CHECK(check_pole_orders(r, p).cls == PoleClass::Inadmissible);

  CMat upper = res;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < i; ++j) upper(i, j) = 0;
  upper -= (upper.trace() / 3.0) * CMat::Identity(3, 3);
  CMat strict_upper = upper;
  for (int i = 0; i < 3; ++i) strict_upper(i, i) = 0;
  // z^{-1}-free, positive-mu part pushed to order 1: simple pole only on lower entries
  PunctureData q{alpha, {{0, upper - strict_upper + res.triangularView<Eigen::StrictlyLower>().toDenseMatrix()},
                         {1, strict_upper}}};
  CHECK(check_pole_orders(r, q).cls == PoleClass::Parabolic);
  auto g = gr_res(r, q);
  CMat levi = CMat::Zero(3, 3);
  for (int i = 0; i < 3; ++i) levi(i, i) = res(i, i) - res.trace() / 3.0;
  CHECK((g.value - levi).norm() < 1e-10);
  CHECK_FALSE(g.ambiguity_active);

  PunctureData regular{QVec(3, Q(0)), {{1, res}}};
  auto g0 = gr_res(r, regular);
  CHECK(g0.value.norm() < 1e-14);
  CHECK(check_pole_orders(r, regular).cls == PoleClass::StrictlyParabolic);
}

TEST_CASE("strictly parabolic implies parabolic on random data") {
  auto r = build_realization(complex_group(Group::SLC, 3));
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> num(-6, 6), ord(-2, 2);
  int strict = 0;
  for (int trial = 0; trial < 200; ++trial) {
    QVec a{Q(num(rng), 6), Q(num(rng), 6), Q(0)};
    a[2] = -a[0] - a[1];
    PunctureData p{a, {}};
    for (int k = 0; k < 2; ++k) {
      CMat m = CMat::Zero(3, 3);
      int i = trial % 3, j = (trial / 3 + k) % 3;
      if (i == j) continue;
      m(i, j) = 1;
      p.laurent.push_back({ord(rng), m});
    }
    auto pc = check_pole_orders(r, p);
    if (pc.cls == PoleClass::StrictlyParabolic) {
      ++strict;
      CHECK(pc.violations.empty());
    }
    CHECK((pc.cls == PoleClass::Inadmissible) == !pc.violations.empty());
  }
  CHECK(strict > 0);
}

TEST_CASE("parabolic gauge membership") {
  auto r = build_realization(split_sl2r());
  QVec wall{Q(1, 2), Q(-1, 2)};
  // n in ker(ad alpha + 1)
  auto g = exp_over_z(E(2, 1, 0));
  REQUIRE(g.size() == 2);
  CHECK(is_parabolic_gauge(r, g, wall).bounded);

  // holomorphic, value in the parabolic subgroup (lower triangular for this alpha)
  std::vector<LaurentTerm> hol{{0, CMat::Identity(2, 2) + 0.5 * E(2, 1, 0)}, {1, E(2, 0, 1)}};
  CHECK(is_parabolic_gauge(r, hol, wall).bounded);
  std::vector<LaurentTerm> off{{0, CMat::Identity(2, 2) + E(2, 0, 1)}};
  CHECK_FALSE(is_parabolic_gauge(r, off, wall).bounded);

  QVec interior{Q(1, 4), Q(-1, 4)};
  auto gi = is_parabolic_gauge(r, g, interior);
  CHECK_FALSE(gi.bounded);
  REQUIRE(gi.failures.size() == 1);
  CHECK(gi.failures[0].mu == Q(-1, 2));

  CHECK_THROWS_AS(exp_over_z(CMat::Identity(2, 2)), Error);
}

TEST_CASE("graded residue changes by Ad(exp n) under exp(n/z)") {
  auto r = build_realization(complex_group(Group::SLC, 3));
  QVec alpha{Q(1, 2), Q(0), Q(-1, 2)};
  CMat n = E(3, 2, 0);  // ad(alpha) eigenvalue -1
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    // parabolic field: entry (i,j) at the minimal admissible order
    Series phi;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Q mu = alpha[i] - alpha[j];
        int k = static_cast<int>(-floor_q(-mu));
        for (int extra = 0; extra < 2; ++extra) {
          CMat m = CMat::Zero(3, 3);
          m(i, j) = cd(nd(rng), nd(rng));
          if (i == j) {
            m(i, i) = nd(rng);
            m((i + 1) % 3, (i + 1) % 3) = -m(i, i);
          }
          if (phi.count(k + extra))
            phi[k + extra] += m;
          else
            phi[k + extra] = m;
        }
      }
    PunctureData p{alpha, to_terms(phi)};
    REQUIRE(check_pole_orders(r, p).cls == PoleClass::Parabolic);
    auto g0 = gr_res(r, p);

    auto gs = to_series(exp_over_z(n)), gi = to_series(exp_over_z(-n));
    PunctureData q{alpha, to_terms(mul(mul(gs, phi), gi))};
    REQUIRE(check_pole_orders(r, q).cls != PoleClass::Inadmissible);
    auto g1 = gr_res(r, q);
    CMat en = matrix_exp(n);
    CHECK((g1.value - en * g0.value * en.inverse()).norm() < 1e-9);
    auto s0 = sorted_real_spectrum(g0.semisimple), s1 = sorted_real_spectrum(g1.semisimple);
    for (int k = 0; k < 3; ++k) CHECK(s0[k] == doctest::Approx(s1[k]).epsilon(1e-8));
    CHECK(rank_sequence(g0.nilpotent) == rank_sequence(g1.nilpotent));
  }
}

TEST_CASE("uniformizing instance is stable with pardeg L = 1/2") {
  auto d = uniformizing_instance();
  auto r = build_realization(d.group);
  for (const auto& p : d.punctures) {
    CHECK(check_pole_orders(r, p).cls == PoleClass::Parabolic);
    auto g = gr_res(r, p);
    CHECK(g.semisimple.norm() < 1e-10);
    CHECK(rank_sequence(g.nilpotent) == std::vector<int>{1, 0});
  }
  // pardeg L = deg L - sum of weights on L
  Q pardeg_L = d.degrees[1];
  for (const auto& p : d.punctures) pardeg_L -= p.weight[1];
  CHECK(pardeg_L == Q(1, 2));
  // same number from the reduction machinery: s = diag(0, -1) picks out L
  CHECK(subset_pardeg(d, {1}, {Q(0), Q(-1)}) == -Q(1, 2));

  auto v = stability_check(d);
  CHECK(v.verdict == Verdict::Stable);
  CHECK(v.complete);
  REQUIRE(v.slope_table.size() == 1);
  CHECK(v.slope_table[0].reduction_id == "E{1}");
  CHECK(v.slope_table[0].slope == Q(1));

  // with q2 != 0 there are no invariant coordinate lines
  d.punctures[0].laurent.push_back({0, E(2, 1, 0)});
  auto w = stability_check(d);
  CHECK(w.verdict == Verdict::Stable);
  CHECK(w.slope_table.empty());
  CHECK_FALSE(w.complete);
  CHECK(w.note == "no destabilizer found up to bound");
}

TEST_CASE("zero Higgs field on L + L^{-1} is unstable") {
  ParabolicHiggsData d;
  d.group = complex_group(Group::SLC, 2);
  d.degrees = {Q(2), Q(-2)};
  auto v = stability_check(d);
  CHECK(v.verdict == Verdict::Unstable);
  REQUIRE(v.witness);
  CHECK(v.witness->reduction_id == "E{1}");
  CHECK(v.witness->slope == Q(-4));  // -2 - 2
  CHECK(v.witness->slope < 0);
}

TEST_CASE("direct sum of isomorphic pieces is polystable") {
  ParabolicHiggsData d;
  d.group = complex_group(Group::GLC, 2);
  d.degrees = {Q(1), Q(1)};
  d.punctures.push_back({{Q(1, 3), Q(1, 3)}, {}});
  auto v = stability_check(d);
  CHECK(v.verdict == Verdict::Polystable);
  REQUIRE(v.witness);
  CHECK(v.witness->slope == 0);

  // a nilpotent coupling from the second summand into the first leaves a
  // zero-slope invariant line that does not split
  ParabolicHiggsData s = d;
  s.support = {{false, true}, {false, false}};
  auto w = stability_check(s);
  CHECK(w.verdict == Verdict::StrictlySemistable);
  CHECK(w.complete);
}

TEST_CASE("rank-two degree sweep catches non-coordinate lines") {
  // O + O with weights (0, 1/2) at three points: a generic line through the
  // small-weight direction at all three points needs a section of O(1)+O(1)
  ParabolicHiggsData d;
  d.group = complex_group(Group::GLC, 2);
  d.degrees = {Q(0), Q(0)};
  for (int k = 0; k < 3; ++k) d.punctures.push_back({{Q(0), Q(1, 2)}, {}});
  auto v = stability_check(d);
  CHECK_FALSE(v.complete);
  bool saw_sweep = false;
  for (const auto& e : v.slope_table) saw_sweep = saw_sweep || e.reduction_id.rfind("line(", 0) == 0;
  CHECK(saw_sweep);
  // the coordinate line with the small weight: slope 0 - 3/2 < 0
  CHECK(v.verdict == Verdict::Unstable);
}

TEST_CASE("slope is linear in the character") {
  auto d = uniformizing_instance();
  d.c = {Q(1, 5), Q(-1, 5)};
  for (int k = 1; k <= 4; ++k) {
    StabilityOptions opt;
    opt.exhaustive = false;
    opt.certificate.push_back({"L^-1", {0}, {Q(-k), Q(k)}, true});
    auto v = stability_check(d, opt);
    REQUIRE(v.slope_table.size() == 1);
    // <c,s> = -2k/5
    CHECK(v.slope_table[0].slope == Q(k) * (Q(1) + Q(2, 5)));
    CHECK(v.verdict == Verdict::Stable);
  }
  StabilityOptions skip;
  skip.exhaustive = false;
  skip.certificate.push_back({"bad", {0}, {}, false});
  auto v = stability_check(d, skip);
  CHECK(v.slope_table.empty());
}

TEST_CASE("Hecke transforms") {
  QVec deg{Q(2), Q(-1), Q(0)};
  std::vector<QVec> w{{Q(1, 3), Q(0), Q(-1, 3)}, {Q(1, 4), Q(1, 4), Q(-1, 2)}};
  auto id = hecke_transform(w, {QVec(3, Q(0)), QVec(3, Q(0))}, deg, LatticeMode::SL);
  CHECK(id.weights == w);
  CHECK(id.degrees == deg);

  std::mt19937 rng(17);
  std::uniform_int_distribution<int> num(-5, 5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<QVec> lam(2, QVec(3));
    std::vector<QVec> neg(2, QVec(3));
    for (int j = 0; j < 2; ++j) {
      lam[j][0] = num(rng);
      lam[j][1] = num(rng);
      lam[j][2] = -lam[j][0] - lam[j][1];
      for (int k = 0; k < 3; ++k) neg[j][k] = -lam[j][k];
    }
    auto fwd = hecke_transform(w, lam, deg, LatticeMode::SL);
    auto back = hecke_transform(fwd.weights, neg, fwd.degrees, LatticeMode::SL);
    CHECK(back.weights == w);
    CHECK(back.degrees == deg);
  }

  CHECK_THROWS_AS(hecke_transform(w, {{Q(1), Q(0), Q(0)}, QVec(3, Q(0))}, deg, LatticeMode::SL), Error);
  CHECK_NOTHROW(hecke_transform(w, {{Q(1), Q(0), Q(0)}, QVec(3, Q(0))}, deg, LatticeMode::GL));
  CHECK_THROWS_AS(hecke_transform(w, {{Q(1, 2), Q(0), Q(0)}, QVec(3, Q(0))}, deg, LatticeMode::GL), Error);
  CHECK(in_cochar_lattice(LatticeMode::PGL, {Q(-1, 2), Q(1, 2)}));
  CHECK_FALSE(in_cochar_lattice(LatticeMode::SL, {Q(-1, 2), Q(1, 2)}));
}

TEST_CASE("half-lattice Hecke on the uniformizing instance") {
  auto d = uniformizing_instance();
  std::vector<QVec> w, lam(3, QVec{Q(-1, 2), Q(1, 2)});
  for (const auto& p : d.punctures) w.push_back(p.weight);
  auto h = hecke_transform(w, lam, d.degrees, LatticeMode::PGL);
  for (const auto& x : h.weights) CHECK(x == QVec{Q(0), Q(0)});
  CHECK(h.degrees == QVec{Q(-1, 2), Q(1, 2)});
  // parabolic degree of L unchanged
  Q before = d.degrees[1] - 3 * w[0][1];
  Q after = h.degrees[1] - 3 * h.weights[0][1];
  CHECK(before == after);
}

TEST_CASE("stability verdicts survive common Hecke shifts") {
  std::mt19937 rng(23);
  std::uniform_int_distribution<int> num(-4, 4), den(1, 4), coin(0, 1);
  for (int trial = 0; trial < 50; ++trial) {
    ParabolicHiggsData d;
    d.group = complex_group(Group::SLC, 3);
    d.degrees = {Q(num(rng)), Q(num(rng)), Q(0)};
    d.degrees[2] = -d.degrees[0] - d.degrees[1];
    for (int j = 0; j < 2; ++j) {
      QVec a{Q(num(rng), 4 * den(rng)), Q(num(rng), 4 * den(rng)), Q(0)};
      a[2] = -a[0] - a[1];
      d.punctures.push_back({a, {}});
    }
    d.support.assign(3, std::vector<bool>(3, false));
    d.support[0][1] = coin(rng);
    d.support[1][2] = coin(rng);
    d.support[2][0] = coin(rng);
    StabilityOptions opt;
    opt.exhaustive = false;
    opt.certificate = {{"a", {0}, {}, true}, {"b", {0, 1}, {}, true}, {"c", {2}, {Q(1), Q(1), Q(-2)}, true}};
    auto v0 = stability_check(d, opt);
    std::vector<QVec> lam;
    for (int j = 0; j < 2; ++j) {
      QVec l{Q(num(rng)), Q(num(rng)), Q(0)};
      l[2] = -l[0] - l[1];
      lam.push_back(l);
    }
    auto v1 = stability_check(hecke_transform(d, lam), opt);
    CHECK(v0.verdict == v1.verdict);
    REQUIRE(v0.slope_table.size() == v1.slope_table.size());
    for (size_t k = 0; k < v0.slope_table.size(); ++k) CHECK(v0.slope_table[k].slope == v1.slope_table[k].slope);
  }
}

TEST_CASE("weight genericity") {
  auto zero = genericity_check({QVec(2, Q(0)), QVec(2, Q(0))}, true);
  CHECK_FALSE(zero.generic);

  auto third = genericity_check({{Q(1, 3), Q(0)}}, true);
  CHECK(third.generic);

  auto half = genericity_check({{Q(1, 2), Q(1, 2)}, {Q(1, 2), Q(1, 2)}}, true);
  CHECK_FALSE(half.generic);
  CHECK(half.character == "determinant");
  CHECK(half.value == Q(2));

  // traceless rank 2: character diag(-1,1)/1 over two points, 1/4 - (-1/4) ... sums to 1
  auto sl = genericity_check({{Q(1, 4), Q(-1, 4)}, {Q(1, 4), Q(-1, 4)}}, false);
  CHECK_FALSE(sl.generic);
  REQUIRE(sl.positions.size() == 2);
  CHECK(is_integer(sl.value));

  auto sl_gen = genericity_check({{Q(1, 6), Q(-1, 6)}}, false);
  CHECK(sl_gen.generic);
}
