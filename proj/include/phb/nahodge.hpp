#pragma once

#include <string>
#include <vector>

#include "phb/liealg.hpp"
#include "phb/parhiggs.hpp"

namespace phb {

// Scalar in front of the noncompact exponent of the monodromy: 2*pi (real
// scale, the default) or 2*pi*i (imaginary scale, what transport of the flat
// connection produces).
enum class MonodromyConvention { RealScale, ImaginaryScale };
std::string convention_name(MonodromyConvention c);
MonodromyConvention parse_convention(const std::string& s);
cd convention_scale(MonodromyConvention c);

struct PunctureDictionaryEntry {
  RVec alpha;          // torus coordinates
  CMat alpha_matrix;   // Hermitian element of i*t
  CMat s;              // semisimple part, tau-normal representative ([s, s^*] = 0)
  SL2Triple triple;    // x = H, e = X, f = Y with X = Y^*
  CMat conjugator;     // element of H^C carrying the input (s, Y) to (s, triple.f)
  CMat beta;           // s - tau(s)
  CMat monodromy;
  JordanFactors factors;  // elliptic, hyperbolic, unipotent factors of the formula
  MonodromyConvention convention = MonodromyConvention::RealScale;
  std::string provenance;
};

PunctureDictionaryEntry higgs_to_localsystem(const ReductiveRealization& r, const RVec& alpha, const CMat& s,
                                             const CMat& y,
                                             MonodromyConvention conv = MonodromyConvention::RealScale);

struct HiggsSideRecovery {
  RVec alpha_spectrum;  // canonical alcove representative, descending
  CMat alpha_log;       // element whose exp(2 pi i .) is the elliptic part attributed to alpha
  CMat s;
  std::vector<cd> s_spectrum;
  CMat nilpotent_log;   // N = Y - H - X up to H^C, with unipotent factor exp(c N)
  OrbitCertificate y_certificate;
  JordanFactors factors;
  bool log_branch_ambiguous = false;
  std::string note;
};

// beta may be null: the real part of s is then taken to be zero and noted.
HiggsSideRecovery localsystem_to_higgs(const ReductiveRealization& r, const CMat& monodromy, const CMat* beta,
                                       MonodromyConvention conv = MonodromyConvention::RealScale);

// Spectrum of the canonical alcove logarithm of an elliptic element:
// descending, differences in [0, 1], trace zero when `traceless`.
RVec canonical_alcove_spectrum(const CMat& elliptic, bool traceless, bool* on_wall = nullptr);

// H^C-orbit certificate of Y for a normal triple stored as (H, X, Y).
OrbitCertificate y_orbit_certificate(const ReductiveRealization& r, const SL2Triple& hxy);

std::vector<cd> sorted_eigenvalues(const CMat& a);

double max_commutator(const JordanFactors& f);

enum class SL2Lift { MinusUnipotent, Cusp };
std::string lift_name(SL2Lift l);

// q_j given by Laurent terms coeff * z^order (dz)^{j+1} at a marked point;
// allowed orders are >= -j.
struct DifferentialTerm {
  int j = 1;
  int puncture = 0;
  int order = 0;
  cd coeff = 0;
};

struct HitchinSectionInput {
  int n = 2;  // SL(n,R), principal embedding; n = 2 is the plain SL(2,R) case
  int genus = 0;
  int punctures = 3;
  SL2Lift lift = SL2Lift::Cusp;  // MinusUnipotent only for n = 2
  std::vector<DifferentialTerm> q;
};

ParabolicHiggsData hitchin_section(const HitchinSectionInput& in);

// Toledo invariant of SU(p,q) data (or the split SL(2,R) model, read as SU(1,1)):
// 2 (q pardeg V - p pardeg W) / (p + q), V the first p summands.
Q toledo_invariant(const ParabolicHiggsData& d);

struct MilnorWoodReport {
  Q tau;
  Q euler;  // 2g - 2 + n
  int rank_plus = 0, rank_minus = 0;
  Q lower_margin, upper_margin;  // tau + rk(phi+) euler,  rk(phi-) euler - tau
  bool ok = true;
  std::string violated;  // "", "lower" or "upper"
};

MilnorWoodReport milnor_wood_check(const ParabolicHiggsData& d);

}  // namespace phb
