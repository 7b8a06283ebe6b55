#pragma once

#include <string>
#include <vector>

#include "phb/common.hpp"

namespace phb {

enum class Group { GLC, SLC, U, SU, SLR, SUpq };

// Matrix model for SL(n,R).  Standard: h = so(n), m = symmetric.  SplitDiagonal:
// the real form {X = S conj(X) S} with S the antidiagonal identity, in which a
// maximal torus of H^C is diagonal (for n = 2 this is literally su(1,1)).
enum class Model { Standard, SplitDiagonal };

struct RealizationSpec {
  Group group = Group::GLC;
  int n = 0;
  int p = 0, q = 0;
  Model model = Model::Standard;
};

// A concrete real form g of gl_N(C) or sl_N(C) with Cartan involution
// theta(X) = -X^* on g and invariant form B(x,y) = b_scale * Re tr(xy).
struct ReductiveRealization {
  RealizationSpec spec;
  std::string label;
  int N = 0;
  bool traceless = false;
  bool complex_group = false;  // GL(n,C), SL(n,C) viewed as real groups
  bool compact = false;
  double b_scale = 1.0;

  std::vector<CMat> g_basis, h_basis, m_basis;     // real bases
  std::vector<CMat> gC_basis, hC_basis, mC_basis;  // orthonormal complex bases
  CMat torus_frame;                                // unitary U: U diag(d) U^* lies in i*t

  CMat sigma(const CMat& x) const;  // conjugation of g^C fixing g (identity for complex groups)
  CMat theta(const CMat& x) const;  // complex-linear Cartan involution on g^C
  static CMat tau(const CMat& x) { return -x.adjoint(); }
  double B(const CMat& x, const CMat& y) const { return b_scale * (x * y).trace().real(); }

  bool valid_torus_coords(const RVec& d, double tol = 1e-12) const;
  CMat torus_element(const RVec& d) const;
  int torus_rank() const;
  // Weights of i*t on m^C, as coefficient vectors c with weight(d) = c . d
  std::vector<RVec> m_weights() const;
  // Orthogonal projections onto g^C, h^C, m^C (Frobenius).
  CMat project(const std::vector<CMat>& onb, const CMat& x) const;
  bool in_real_form(const CMat& x, double tol = 1e-10) const;
};

ReductiveRealization build_realization(const RealizationSpec& spec);

enum class Target { hC, mC, gC };

struct Eigenspace {
  double mu;
  std::vector<CMat> basis;
};

// Eigenspaces of ad(s) on the target for diagonalizable s with real spectrum.
std::vector<Eigenspace> eigen_split(const ReductiveRealization& r, const CMat& s, Target target,
                                    double cluster_tol = 1e-10);
std::vector<Eigenspace> ad_eigendecompose(const ReductiveRealization& r, const RVec& torus_coords,
                                          Target target);
const std::vector<CMat>& target_basis(const ReductiveRealization& r, Target t);

struct JordanFactors {
  CMat g_e, g_h, g_u;
};

JordanFactors jordan_multiplicative(const CMat& g, double defect_tol = 1e-8);

struct AdditiveJordan {
  CMat semisimple, nilpotent;
};
AdditiveJordan jordan_additive(const CMat& a, double defect_tol = 1e-8);

enum class Flavor { Plain, Normal, KSReal, KSNormal };
std::string flavor_name(Flavor f);

struct SL2Triple {
  CMat x, e, f;
  Flavor flavor = Flavor::Plain;
};

double bracket_defect(const SL2Triple& t);
bool is_nilpotent(const CMat& e, double tol = 1e-8);

// Completes a nonzero nilpotent e to a triple with x in xspace and f in fspace
// (spans of matrices).  Throws NoSolution if the linear systems are inconsistent.
SL2Triple complete_triple(const CMat& e, const std::vector<CMat>& xspace,
                          const std::vector<CMat>& fspace);

SL2Triple jacobson_morozov(const ReductiveRealization& r, const CMat& e);

struct KSNormalization {
  SL2Triple triple;
  CMat conjugator;  // g with triple = Ad(g) input
  int iterations = 0;
};

// Moves a plain real triple (resp. a normal triple) by G (resp. H^C) until
// theta(e) = -f (resp. f = e^*, which is sigma(e) on m^C for real forms).
KSNormalization normalize_kostant_sekiguchi(const ReductiveRealization& r, const SL2Triple& t,
                                            double tol = 1e-10, int max_iter = 10000);
// Same, moving only along exp of the given Hermitian directions.
KSNormalization normalize_kostant_sekiguchi(const ReductiveRealization& r, const SL2Triple& t,
                                            const std::vector<CMat>& directions, double tol = 1e-10,
                                            int max_iter = 10000);

SL2Triple cayley_transform(const ReductiveRealization& r, const SL2Triple& ks_real);
SL2Triple inverse_cayley_transform(const ReductiveRealization& r, const SL2Triple& ks_normal);

// Conjugation invariants of an element of h^C under H^C, and rank data of e.
struct OrbitCertificate {
  std::vector<double> x_invariants;
  std::vector<int> rank_sequence;
};

std::vector<double> hC_invariants(const ReductiveRealization& r, const CMat& x);
OrbitCertificate certificate_of(const ReductiveRealization& r, const SL2Triple& normal);
bool same_orbit(const OrbitCertificate& a, const OrbitCertificate& b, double tol = 1e-6);

struct KSOrbitImage {
  CMat representative;  // e' in m^C
  SL2Triple normal_triple;
  OrbitCertificate certificate;
};

KSOrbitImage kostant_sekiguchi_orbit_map(const ReductiveRealization& r, const CMat& e);

// Normal triple (H, X, Y) through a nilpotent Y in m^C, inside the subalgebra
// spanned by hspace + mspace; used for H^C-orbit certificates of Y.
SL2Triple normal_triple_through(const CMat& y, const std::vector<CMat>& hspace,
                                const std::vector<CMat>& mspace);

CMat matrix_exp(const CMat& a);
CMat matrix_log(const CMat& a);
cd pfaffian(const CMat& a);  // a antisymmetric, small size

}  // namespace phb
