#include "phb/cartan.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

namespace phb {

namespace {

QVec unit(int n, int i, Q c = 1) {
  QVec v(n, Q(0));
  v[i] = c;
  return v;
}

QVec add(const QVec& a, const QVec& b, Q cb = 1) {
  QVec r(a);
  for (size_t i = 0; i < r.size(); ++i) r[i] += cb * b[i];
  return r;
}

Q dot(const QVec& a, const QVec& b) {
  Q s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Positive roots of a classical type in epsilon coordinates, in a fixed order.
std::vector<QVec> ambient_positive_roots(char t, int n, int m) {
  std::vector<QVec> roots;
  if (t == 'A') {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) roots.push_back(add(unit(m, i), unit(m, j), -1));
    return roots;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      roots.push_back(add(unit(m, i), unit(m, j), -1));
      roots.push_back(add(unit(m, i), unit(m, j), 1));
    }
  if (t == 'B')
    for (int i = 0; i < n; ++i) roots.push_back(unit(m, i));
  if (t == 'C')
    for (int i = 0; i < n; ++i) roots.push_back(unit(m, i, 2));
  return roots;
}

std::vector<QVec> ambient_simple_roots(char t, int n, int m) {
  std::vector<QVec> s;
  if (t == 'A') {
    for (int i = 0; i < n; ++i) s.push_back(add(unit(m, i), unit(m, i + 1), -1));
    return s;
  }
  for (int i = 0; i + 1 < n; ++i) s.push_back(add(unit(m, i), unit(m, i + 1), -1));
  if (t == 'B') s.push_back(unit(m, n - 1));
  if (t == 'C') s.push_back(unit(m, n - 1, 2));
  if (t == 'D') s.push_back(add(unit(m, n - 2), unit(m, n - 1), 1));
  return s;
}

QVec coroot_of(const QVec& root) {
  Q len2 = dot(root, root);
  QVec c(root);
  for (auto& x : c) x = 2 * x / len2;
  return c;
}

}  // namespace

QMat RootDatum::cartan_matrix() const {
  QMat a(rank, QVec(rank));
  for (int i = 0; i < rank; ++i)
    for (int j = 0; j < rank; ++j) a[i][j] = simple_roots[j][i];
  return a;
}

Q eval(const QVec& covector, const QVec& a) { return dot(covector, a); }

Q pairing(const RootDatum& rd, const QVec& x, const QVec& y) {
  Q s = 0;
  for (int i = 0; i < rd.rank; ++i)
    for (int j = 0; j < rd.rank; ++j) s += x[i] * rd.inner_product[i][j] * y[j];
  return s;
}

QVec to_ambient(const RootDatum& rd, const QVec& a) {
  QVec x(rd.ambient_dim, Q(0));
  for (int i = 0; i < rd.rank; ++i) x = add(x, rd.coroot_basis_ambient[i], a[i]);
  return x;
}

QVec from_ambient(const RootDatum& rd, const QVec& x) {
  // Least-squares-free exact solve: Gram system G a = (<h_i, x>)_i
  QVec rhs(rd.rank);
  for (int i = 0; i < rd.rank; ++i) rhs[i] = dot(rd.coroot_basis_ambient[i], x);
  QVec a = solve_q(rd.inner_product, rhs);
  QVec back = to_ambient(rd, a);
  if (back != x) throw Error("NotInCartan", "vector is not in the span of the coroots");
  return a;
}

RootDatum build_root_datum(char t, int n) {
  bool ok = (t == 'A' && n >= 1) || (t == 'B' && n >= 2) || (t == 'C' && n >= 2) ||
            (t == 'D' && n >= 3);
  if (!ok)
    throw Error("UnsupportedType", std::string(1, t) + "_" + std::to_string(n) +
                                       " (supported: A_n n>=1, B_n n>=2, C_n n>=2, D_n n>=3)");
  RootDatum rd;
  rd.cartan_type = t;
  rd.rank = n;
  rd.ambient_dim = (t == 'A') ? n + 1 : n;
  const int m = rd.ambient_dim;

  auto simple = ambient_simple_roots(t, n, m);
  rd.positive_roots_ambient = ambient_positive_roots(t, n, m);
  for (const auto& s : simple) rd.coroot_basis_ambient.push_back(coroot_of(s));

  rd.inner_product.assign(n, QVec(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      rd.inner_product[i][j] = dot(rd.coroot_basis_ambient[i], rd.coroot_basis_ambient[j]);

  auto covector = [&](const QVec& root) {
    QVec c(n);
    for (int i = 0; i < n; ++i) c[i] = dot(root, rd.coroot_basis_ambient[i]);
    return c;
  };
  for (const auto& s : simple) rd.simple_roots.push_back(covector(s));
  for (const auto& r : rd.positive_roots_ambient) {
    rd.positive_roots.push_back(covector(r));
    rd.coroots.push_back(from_ambient(rd, coroot_of(r)));
  }

  // Cocharacter lattice: coroot lattice for SU(n+1), Z^n for SO and Sp.
  if (t == 'A') {
    for (int i = 0; i < n; ++i) rd.cochar_lattice_basis.push_back(unit(n, i));
  } else {
    for (int i = 0; i < n; ++i) rd.cochar_lattice_basis.push_back(from_ambient(rd, unit(m, i)));
  }
  return rd;
}

AlcoveMembership alcove_membership(const RootDatum& rd, const QVec& a) {
  if (static_cast<int>(a.size()) != rd.rank)
    throw Error("DimensionMismatch", "expected " + std::to_string(rd.rank) + " coordinates, got " +
                                         std::to_string(a.size()));
  AlcoveMembership res{AlcoveClass::Interior, {}};
  for (int k = 0; k < rd.num_positive_roots(); ++k) {
    Q v = eval(rd.positive_roots[k], a);
    if (v < 0 || v > 1) return {AlcoveClass::Outside, {}};
    if (v == 0 || v == 1) res.walls.push_back({k, v});
  }
  if (!res.walls.empty()) res.cls = AlcoveClass::Boundary;
  return res;
}

AlcoveWeight make_alcove_weight(const RootDatum& rd, const QVec& a) {
  AlcoveWeight w;
  w.membership = alcove_membership(rd, a);
  w.coordinates = a;
  for (const auto& r : rd.positive_roots) w.root_values.push_back(eval(r, a));
  return w;
}

bool in_A_prime(const RootDatum& rd, const QVec& a, Scope scope,
                const std::vector<QVec>* m_weights) {
  if (static_cast<int>(a.size()) != rd.rank)
    throw Error("DimensionMismatch", "expected " + std::to_string(rd.rank) + " coordinates");
  if (scope == Scope::G && m_weights == nullptr)
    throw Error("MissingWeights", "scope g requires the m-weight covectors of the realization");
  for (const auto& r : rd.positive_roots)
    if (abs(eval(r, a)) >= 1) return false;
  if (scope == Scope::G)
    for (const auto& w : *m_weights)
      if (abs(eval(w, a)) >= 1) return false;
  return true;
}

QVec reflect(const RootDatum& rd, int i, const QVec& a) {
  // s_i(a) = a - alpha_i(a) h_i
  QVec r(a);
  r[i] -= eval(rd.simple_roots[i], a);
  return r;
}

WeylReduction weyl_reduce(const RootDatum& rd, const QVec& a) {
  WeylReduction w{{}, a};
  for (;;) {
    int bad = -1;
    for (int i = 0; i < rd.rank; ++i)
      if (eval(rd.simple_roots[i], w.reduced) < 0) {
        bad = i;
        break;
      }
    if (bad < 0) return w;
    w.reduced = reflect(rd, bad, w.reduced);
    w.word.push_back(bad);
  }
}

QVec apply_word(const RootDatum& rd, const std::vector<int>& word, const QVec& a) {
  QVec r(a);
  for (int i : word) r = reflect(rd, i, r);
  return r;
}

bool in_cochar_lattice(const RootDatum& rd, const QVec& x) {
  QMat b(rd.rank, QVec(rd.rank));
  for (int i = 0; i < rd.rank; ++i)
    for (int j = 0; j < rd.rank; ++j) b[i][j] = rd.cochar_lattice_basis[j][i];
  QVec c = solve_q(b, x);
  return std::all_of(c.begin(), c.end(), [](const Q& q) { return is_integer(q); });
}

AlcoveNormalization alcove_normalize(const RootDatum& rd, const QVec& a, int K) {
  if (K < 1) throw Error("BadBound", "search bound must be >= 1");
  if (static_cast<int>(a.size()) != rd.rank) throw Error("DimensionMismatch", "coordinate count");
  const int n = rd.rank;

  // Lattice coordinates n_j of a vector x are linear functionals; writing them
  // in terms of simple-root values bounds them on the region |alpha(x)| < 1.
  QMat lb(n, QVec(n));  // columns: lattice basis vectors
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) lb[i][j] = rd.cochar_lattice_basis[j][i];
  QMat lb_inv = inverse_q(lb);  // coroot coords -> lattice coords
  QMat sr(n, QVec(n));          // rows: simple roots
  for (int i = 0; i < n; ++i) sr[i] = rd.simple_roots[i];
  QMat sr_inv = inverse_q(sr);  // simple-root values -> coroot coords
  QVec slack(n, Q(0));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Q m = 0;
      for (int l = 0; l < n; ++l) m += lb_inv[j][l] * sr_inv[l][i];
      slack[j] += abs(m);
    }

  Q maxval = 0;
  for (const auto& r : rd.positive_roots) maxval = std::max(maxval, Q(abs(eval(r, a))));

  for (int k = 1; k <= K; ++k) {
    QVec b(a);
    for (auto& x : b) x *= k;
    QVec c(n, Q(0));  // lattice coordinates of b
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) c[j] += lb_inv[j][l] * b[l];
    Q box = k * maxval + 1;
    std::vector<long> lo(n), hi(n);
    bool empty = false;
    for (int j = 0; j < n; ++j) {
      Q l = std::max(Q(-c[j] - slack[j]), Q(-box));
      Q h = std::min(Q(-c[j] + slack[j]), box);
      lo[j] = floor_q(l).convert_to<long>();
      hi[j] = -floor_q(-h).convert_to<long>();
      if (lo[j] > hi[j]) empty = true;
    }
    if (empty) continue;
    std::vector<long> cur(lo);
    for (;;) {
      QVec lam(n, Q(0));
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) lam[l] += Q(cur[j]) * rd.cochar_lattice_basis[j][l];
      QVec x = add(b, lam);
      if (in_A_prime(rd, x, Scope::H)) {
        AlcoveNormalization out;
        out.k = k;
        out.lattice_vector = lam;
        for (long v : cur) out.lattice_coords.push_back(Q(v));
        out.weyl = weyl_reduce(rd, x);
        if (!in_A_prime(rd, out.weyl.reduced, Scope::H))
          throw Error("InternalError", "normalized weight failed the A' check");
        return out;
      }
      int j = 0;
      while (j < n && cur[j] == hi[j]) {
        cur[j] = lo[j];
        ++j;
      }
      if (j == n) break;
      ++cur[j];
    }
  }
  throw Error("SearchExhausted", "no (k, lambda) with k <= " + std::to_string(K) +
                                     " (bound reached; existence is not ruled out)",
              ErrorClass::Convergence);
}

std::vector<QVec> weyl_orbit(const RootDatum& rd, const QVec& a) {
  std::set<QVec> seen{a};
  std::deque<QVec> todo{a};
  while (!todo.empty()) {
    QVec v = todo.front();
    todo.pop_front();
    for (int i = 0; i < rd.rank; ++i) {
      QVec w = reflect(rd, i, v);
      if (seen.insert(w).second) todo.push_back(w);
    }
  }
  return {seen.begin(), seen.end()};
}

int weyl_group_order(const RootDatum& rd) {
  // The orbit of a regular dominant vector (rho-check) is simply transitive.
  QMat sr(rd.rank, QVec(rd.rank));
  for (int i = 0; i < rd.rank; ++i) sr[i] = rd.simple_roots[i];
  QVec ones(rd.rank, Q(1));
  QVec rho = solve_q(sr, ones);
  return static_cast<int>(weyl_orbit(rd, rho).size());
}

std::string type_label(const RootDatum& rd) {
  return std::string(1, rd.cartan_type) + std::to_string(rd.rank);
}

}  // namespace phb
