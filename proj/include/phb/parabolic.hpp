#pragma once

#include <vector>

#include "phb/liealg.hpp"

namespace phb {

// Parabolic subalgebra p_s = sum of ad(s)-eigenspaces with mu <= 0, its Levi
// l = ker ad(s) and nilradical n (mu < 0), together with chi_s(x) = <s,x>.
struct ParabolicDatum {
  CMat s;
  Target target = Target::gC;
  std::vector<Eigenspace> spaces;  // ascending mu
  std::vector<CMat> p_basis, l_basis, n_basis;
  cd chi(const CMat& x) const { return (s * x).trace(); }
};

ParabolicDatum parabolic_from(const ReductiveRealization& r, const CMat& s, Target target = Target::gC,
                              double cluster_tol = 1e-10);

// ker(ad(alpha) + 1) on the target.
std::vector<CMat> p1_subalgebra(const ReductiveRealization& r, const CMat& alpha, Target target = Target::gC);

struct LeviCentralizer {
  std::vector<CMat> m_tilde;  // ker(Ad(exp 2 pi i alpha) - 1) on m^C
  std::vector<CMat> h_tilde;  // Lie algebra of Stab_{H^C}(exp 2 pi i alpha)
  std::vector<CMat> m0;       // ker ad(alpha) on m^C
  std::vector<CMat> l0;       // ker ad(alpha) on h^C
};

// Integer ad-eigenvalues decide membership; pass exact torus coordinates when
// available so boundary weights are classified without tolerance.
LeviCentralizer levi_centralizer_tilde(const ReductiveRealization& r, const CMat& alpha);
LeviCentralizer levi_centralizer_tilde(const ReductiveRealization& r, const QVec& torus_coords);

CMat torus_element_q(const ReductiveRealization& r, const QVec& coords);

}  // namespace phb
