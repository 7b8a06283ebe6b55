#include <doctest.h>

#include <random>
#include <set>

#include "phb/cartan.hpp"

using namespace phb;

namespace {

// Independent oracle: Weyl group generated by reflection matrices acting on the
// epsilon basis, closed under multiplication.
int weyl_order_by_matrices(const RootDatum& rd) {
  const int m = rd.ambient_dim;
  using M = std::vector<Q>;
  auto mul = [m](const M& a, const M& b) {
    M c(m * m, Q(0));
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < m; ++k)
        if (a[i * m + k] != 0)
          for (int j = 0; j < m; ++j) c[i * m + j] += a[i * m + k] * b[k * m + j];
    return c;
  };
  std::vector<M> gens;
  for (const auto& r : rd.positive_roots_ambient) {
    Q len2 = 0;
    for (const auto& x : r) len2 += x * x;
    M s(m * m, Q(0));
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) s[i * m + j] = (i == j ? Q(1) : Q(0)) - 2 * r[i] * r[j] / len2;
    gens.push_back(s);
  }
  M id(m * m, Q(0));
  for (int i = 0; i < m; ++i) id[i * m + i] = 1;
  std::set<M> group{id};
  std::vector<M> frontier{id};
  while (!frontier.empty()) {
    std::vector<M> next;
    for (const auto& g : frontier)
      for (const auto& s : gens) {
        M h = mul(s, g);
        if (group.insert(h).second) next.push_back(h);
      }
    frontier.swap(next);
  }
  return static_cast<int>(group.size());
}

QVec random_rational_vector(std::mt19937& rng, int n, int den, int range) {
  std::uniform_int_distribution<int> num(-range * den, range * den);
  QVec v;
  for (int i = 0; i < n; ++i) v.emplace_back(num(rng), den);
  return v;
}

QVec random_in_closed_alcove(std::mt19937& rng, const RootDatum& rd) {
  std::uniform_int_distribution<int> den(1, 12);
  for (;;) {
    QVec a = random_rational_vector(rng, rd.rank, den(rng), 1);
    if (alcove_membership(rd, a).cls != AlcoveClass::Outside) return a;
  }
}

}  // namespace

TEST_CASE("root datum A1 has one positive root pairing to 2 with its coroot") {
  auto rd = build_root_datum('A', 1);
  REQUIRE(rd.num_positive_roots() == 1);
  CHECK(eval(rd.positive_roots[0], rd.coroots[0]) == 2);
}

TEST_CASE("root datum sizes and Weyl group orders agree with matrix-closure oracle") {
  auto a2 = build_root_datum('A', 2);
  CHECK(a2.num_positive_roots() == 3);
  CHECK(weyl_order_by_matrices(a2) == 6);
  CHECK(weyl_group_order(a2) == 6);

  auto c2 = build_root_datum('C', 2);
  CHECK(c2.num_positive_roots() == 4);
  CHECK(weyl_order_by_matrices(c2) == 8);
  CHECK(weyl_group_order(c2) == 8);
  // long/short squared length ratio 2
  std::set<Q> lens;
  for (const auto& r : c2.positive_roots_ambient) {
    Q l = 0;
    for (const auto& x : r) l += x * x;
    lens.insert(l);
  }
  REQUIRE(lens.size() == 2);
  CHECK(*lens.rbegin() / *lens.begin() == 2);

  for (auto [t, n] : std::vector<std::pair<char, int>>{{'B', 3}, {'D', 4}, {'A', 3}, {'C', 3}}) {
    auto rd = build_root_datum(t, n);
    CHECK(weyl_group_order(rd) == weyl_order_by_matrices(rd));
  }
}

TEST_CASE("Cartan matrices match the standard tables") {
  auto a = build_root_datum('A', 3).cartan_matrix();
  QMat a_ref{{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}};
  CHECK(a == a_ref);
  // B_n: alpha_n short, A_{n-1,n} = alpha_n(h_{n-1}) = -1, A_{n,n-1} = -2
  auto b = build_root_datum('B', 2).cartan_matrix();
  QMat b_ref{{2, -1}, {-2, 2}};
  CHECK(b == b_ref);
  auto c = build_root_datum('C', 2).cartan_matrix();
  QMat c_ref{{2, -2}, {-1, 2}};
  CHECK(c == c_ref);
  auto d = build_root_datum('D', 4).cartan_matrix();
  QMat d_ref{{2, -1, 0, 0}, {-1, 2, -1, -1}, {0, -1, 2, 0}, {0, -1, 0, 2}};
  CHECK(d == d_ref);
}

TEST_CASE("unsupported types are rejected") {
  CHECK_THROWS_AS(build_root_datum('E', 6), Error);
  CHECK_THROWS_AS(build_root_datum('D', 2), Error);
  CHECK_THROWS_AS(build_root_datum('A', 0), Error);
}

TEST_CASE("coroots lie in the cocharacter lattice and the form is Weyl invariant") {
  for (auto [t, n] : std::vector<std::pair<char, int>>{{'A', 2}, {'B', 3}, {'C', 2}, {'D', 4}}) {
    auto rd = build_root_datum(t, n);
    for (const auto& c : rd.coroots) CHECK(in_cochar_lattice(rd, c));
    std::mt19937 rng(7 + n);
    for (int trial = 0; trial < 10; ++trial) {
      QVec x = random_rational_vector(rng, n, 5, 2), y = random_rational_vector(rng, n, 3, 2);
      for (int i = 0; i < n; ++i)
        CHECK(pairing(rd, reflect(rd, i, x), reflect(rd, i, y)) == pairing(rd, x, y));
    }
  }
}

TEST_CASE("alcove membership examples in A1") {
  auto rd = build_root_datum('A', 1);
  // coordinates are multiples of the coroot, so the root value is 2a
  auto m0 = alcove_membership(rd, {Q(0)});
  CHECK(m0.cls == AlcoveClass::Boundary);
  REQUIRE(m0.walls.size() == 1);
  CHECK(m0.walls[0].level == 0);

  CHECK(alcove_membership(rd, {Q(1, 4)}).cls == AlcoveClass::Interior);

  auto m1 = alcove_membership(rd, {Q(1, 2)});
  CHECK(m1.cls == AlcoveClass::Boundary);
  REQUIRE(m1.walls.size() == 1);
  CHECK(m1.walls[0].level == 1);

  CHECK(alcove_membership(rd, {Q(-1, 4)}).cls == AlcoveClass::Outside);
  CHECK_THROWS_AS(alcove_membership(rd, {Q(0), Q(0)}), Error);
}

TEST_CASE("A' membership in A1 with and without m-weights") {
  auto rd = build_root_datum('A', 1);
  CHECK(in_A_prime(rd, {Q(0)}, Scope::H));
  CHECK_FALSE(in_A_prime(rd, {Q(1, 2)}, Scope::H));  // root value 1
  CHECK_THROWS_AS(in_A_prime(rd, {Q(0)}, Scope::G), Error);

  // SL(2,R) seen through the split torus: m-weights are +-2a in these
  // coordinates, i.e. the same covector as the root.
  std::vector<QVec> mw{{Q(2)}, {Q(-2)}};
  CHECK(in_A_prime(rd, {Q(1, 8)}, Scope::H));
  CHECK(in_A_prime(rd, {Q(1, 8)}, Scope::G, &mw));
  CHECK(in_A_prime(rd, {Q(2, 5)}, Scope::H));
  CHECK(in_A_prime(rd, {Q(2, 5)}, Scope::G, &mw));  // 4/5 < 1
  // With doubled m-weights (ad-eigenvalues of a line-bundle twist) a = 2/5 fails on g.
  std::vector<QVec> mw2{{Q(4)}, {Q(-4)}};
  CHECK(in_A_prime(rd, {Q(1, 8)}, Scope::G, &mw2));
  CHECK_FALSE(in_A_prime(rd, {Q(2, 5)}, Scope::G, &mw2));
}

TEST_CASE("alcove_normalize examples") {
  auto rd = build_root_datum('A', 1);
  auto wall = alcove_normalize(rd, {Q(1, 2)}, 64);  // root value 1
  CHECK(wall.k == 2);
  CHECK(wall.lattice_vector == QVec{Q(-1)});  // minus the coroot
  CHECK(wall.weyl.reduced == QVec{Q(0)});

  auto inside = alcove_normalize(rd, {Q(1, 6)}, 64);  // root value 1/3 is already in A'
  CHECK(inside.k == 1);
  CHECK(inside.lattice_vector == QVec{Q(0)});

  CHECK_THROWS_AS(alcove_normalize(rd, {Q(1, 2)}, 1), Error);
}

TEST_CASE("weyl_reduce examples, idempotence and norm preservation") {
  auto a1 = build_root_datum('A', 1);
  auto r = weyl_reduce(a1, {Q(-1, 4)});
  CHECK(r.word == std::vector<int>{0});
  CHECK(eval(a1.positive_roots[0], r.reduced) == Q(1, 2));
  auto id = weyl_reduce(a1, {Q(1, 4)});
  CHECK(id.word.empty());

  auto a2 = build_root_datum('A', 2);
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    QVec a = random_rational_vector(rng, 2, 7, 2);
    auto w = weyl_reduce(a2, a);
    CHECK(pairing(a2, w.reduced, w.reduced) == pairing(a2, a, a));
    CHECK(weyl_reduce(a2, w.reduced).word.empty());
    CHECK(apply_word(a2, w.word, a) == w.reduced);
    // oracle: exactly one dominant element in the orbit
    int dominant = 0;
    for (const auto& v : weyl_orbit(a2, a)) {
      bool dom = eval(a2.simple_roots[0], v) >= 0 && eval(a2.simple_roots[1], v) >= 0;
      if (dom) {
        ++dominant;
        CHECK(v == w.reduced);
      }
    }
    CHECK(dominant == 1);
  }
}

TEST_CASE("root values on the closed alcove stay in [-1,1]") {
  for (auto [t, n] : std::vector<std::pair<char, int>>{{'A', 2}, {'C', 2}, {'B', 3}}) {
    auto rd = build_root_datum(t, n);
    std::mt19937 rng(101);
    for (int trial = 0; trial < 30; ++trial) {
      QVec a = random_in_closed_alcove(rng, rd);
      for (const auto& root : rd.positive_roots) {
        Q v = eval(root, a);
        CHECK(v >= -1);
        CHECK(v <= 1);
      }
    }
  }
}

TEST_CASE("alcove_normalize output always passes the A' test") {
  for (auto [t, n] : std::vector<std::pair<char, int>>{{'A', 1}, {'A', 2}, {'C', 2}, {'B', 2}}) {
    auto rd = build_root_datum(t, n);
    std::mt19937 rng(5);
    for (int trial = 0; trial < 40; ++trial) {
      QVec a = random_rational_vector(rng, n, 9, 3);
      auto res = alcove_normalize(rd, a, 64);
      QVec x(a);
      for (int i = 0; i < n; ++i) x[i] = res.k * a[i] + res.lattice_vector[i];
      CHECK(in_cochar_lattice(rd, res.lattice_vector));
      CHECK(in_A_prime(rd, x, Scope::H));
      CHECK(in_A_prime(rd, res.weyl.reduced, Scope::H));
      CHECK(alcove_membership(rd, res.weyl.reduced).cls != AlcoveClass::Outside);
    }
  }
}
