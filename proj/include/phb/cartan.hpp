#pragma once

#include <string>
#include <vector>

#include "phb/common.hpp"

namespace phb {

// Root datum of a classical compact group.  Coordinates on t are taken in the
// basis of simple coroots h_1..h_r, so a vector a means sum a_i h_i.
// Groups: A_n -> SU(n+1), B_n -> SO(2n+1), C_n -> Sp(n), D_n -> SO(2n).
struct RootDatum {
  char cartan_type = 'A';
  int rank = 0;
  int ambient_dim = 0;  // size of the epsilon-basis realization

  std::vector<QVec> simple_roots;    // covectors: root(h_i) for each i
  std::vector<QVec> positive_roots;  // covectors, canonical order
  std::vector<QVec> coroots;         // positive coroots in coroot coordinates
  std::vector<QVec> cochar_lattice_basis;
  QMat inner_product;  // Gram matrix of h_i under the standard epsilon form

  std::vector<QVec> positive_roots_ambient;
  std::vector<QVec> coroot_basis_ambient;  // h_i as epsilon vectors

  QMat cartan_matrix() const;  // A_ij = alpha_j(h_i)
  int num_positive_roots() const { return static_cast<int>(positive_roots.size()); }
};

RootDatum build_root_datum(char cartan_type, int rank);

Q eval(const QVec& covector, const QVec& a);
Q pairing(const RootDatum& rd, const QVec& x, const QVec& y);
QVec to_ambient(const RootDatum& rd, const QVec& a);
QVec from_ambient(const RootDatum& rd, const QVec& x);

struct Wall {
  int root_index;  // index into positive_roots
  Q level;         // 0 or 1
};

enum class AlcoveClass { Interior, Boundary, Outside };

struct AlcoveMembership {
  AlcoveClass cls;
  std::vector<Wall> walls;
};

AlcoveMembership alcove_membership(const RootDatum& rd, const QVec& a);

struct AlcoveWeight {
  QVec coordinates;
  QVec root_values;  // over positive roots
  AlcoveMembership membership;
};

AlcoveWeight make_alcove_weight(const RootDatum& rd, const QVec& a);

enum class Scope { H, G };

// True iff every root value (and, for scope G, every supplied m-weight value)
// has absolute value < 1.
bool in_A_prime(const RootDatum& rd, const QVec& a, Scope scope,
                const std::vector<QVec>* m_weights = nullptr);

struct WeylReduction {
  std::vector<int> word;  // simple reflections applied, in order
  QVec reduced;
};

QVec reflect(const RootDatum& rd, int simple_index, const QVec& a);
WeylReduction weyl_reduce(const RootDatum& rd, const QVec& a);
QVec apply_word(const RootDatum& rd, const std::vector<int>& word, const QVec& a);

struct AlcoveNormalization {
  int k = 1;
  QVec lattice_vector;  // lambda, in coroot coordinates
  QVec lattice_coords;  // lambda in the cochar lattice basis (integers)
  WeylReduction weyl;   // reduction of k*a + lambda
};

AlcoveNormalization alcove_normalize(const RootDatum& rd, const QVec& a, int search_bound);

bool in_cochar_lattice(const RootDatum& rd, const QVec& x);

// Orbit of a vector under W, used by tests and weyl group order.
std::vector<QVec> weyl_orbit(const RootDatum& rd, const QVec& a);
int weyl_group_order(const RootDatum& rd);

std::string type_label(const RootDatum& rd);

}  // namespace phb
