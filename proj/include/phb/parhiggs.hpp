#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phb/degree.hpp"
#include "phb/liealg.hpp"

namespace phb {

// One term c * z^order (dz/z) of a local expansion, written in the declared
// trivialization at the marked point.
struct LaurentTerm {
  int order = 0;
  CMat matrix;
};

struct PunctureData {
  QVec weight;  // torus coordinates of alpha (diagonal in the realization's torus frame)
  std::vector<LaurentTerm> laurent;
};

// Desk model: a split bundle O(d_1) + ... + O(d_N) on a genus-g curve, written
// in the vector representation of the realization, with parabolic weights that
// are diagonal in the summand basis.  support(j,k) records whether the global
// Higgs field has a nonzero (j,k) entry.
struct ParabolicHiggsData {
  int genus = 0;
  RealizationSpec group;
  QVec degrees;
  std::vector<PunctureData> punctures;
  std::vector<std::vector<bool>> support;  // empty = union of local supports
  QVec c;                                  // central parameter, diagonal; empty = 0

  int rank() const { return static_cast<int>(degrees.size()); }
};

std::vector<std::vector<bool>> effective_support(const ParabolicHiggsData& d);

// Component of a matrix in an ad(alpha)-eigenspace, with the exact eigenvalue.
struct EigenComponent {
  Q mu;
  CMat matrix;
};

std::vector<EigenComponent> eigen_components(const ReductiveRealization& r, const QVec& alpha, const CMat& x,
                                             Target target);

enum class PoleClass { Parabolic, StrictlyParabolic, Inadmissible };
std::string pole_class_name(PoleClass p);

struct PoleViolation {
  int order;
  Q mu;
  int required;  // minimal allowed order -floor(-mu)
};

struct PoleCheck {
  PoleClass cls;
  std::vector<PoleViolation> violations;
};

PoleCheck check_pole_orders(const ReductiveRealization& r, const PunctureData& p);

struct GrRes {
  CMat value;
  CMat semisimple, nilpotent;
  QVec torus_generator;   // alpha: GrRes is defined up to Ad(exp(t alpha))
  bool ambiguity_active;  // ad(alpha) has nonzero integer eigenvalues on m^C
};

GrRes gr_res(const ReductiveRealization& r, const PunctureData& p);

struct GaugeCheck {
  bool bounded;
  std::vector<PoleViolation> failures;  // required = ceiling on -lambda
};

// |z|^{-alpha} g(z) |z|^{alpha} bounded near 0, for g given by Laurent terms.
GaugeCheck is_parabolic_gauge(const ReductiveRealization& r, const std::vector<LaurentTerm>& g, const QVec& alpha);

// Laurent expansion of exp(n / z) for nilpotent n.
std::vector<LaurentTerm> exp_over_z(const CMat& n);

enum class Verdict { Stable, StrictlySemistable, Polystable, Unstable };
std::string verdict_name(Verdict v);

struct CandidateReduction {
  std::string id;
  std::vector<int> subset;  // coordinates spanning the subbundle
  QVec character;           // diagonal s; empty = -(N-r) on subset, r elsewhere
  bool phi_compatible = true;
};

struct SlopeEntry {
  std::string reduction_id;
  std::string character_id;
  Q pardeg;
  Q slope;  // pardeg - <c, s>
};

struct StabilityVerdict {
  Verdict verdict = Verdict::Stable;
  std::optional<SlopeEntry> witness;
  std::vector<SlopeEntry> slope_table;
  bool complete = false;
  int search_bound = 0;
  std::string note;
};

struct StabilityOptions {
  bool exhaustive = true;
  std::vector<CandidateReduction> certificate;  // used when exhaustive is false
  int degree_sweep = 4;                          // depth of the rank-2 line sweep
};

StabilityVerdict stability_check(const ParabolicHiggsData& d, const StabilityOptions& opt = {});

// Parabolic degree of the reduction to the coordinate subbundle on `subset`
// with diagonal character s (coordinates in the summand basis).
Q subset_pardeg(const ParabolicHiggsData& d, const std::vector<int>& subset, const QVec& s);

enum class LatticeMode { GL, SL, PGL };
LatticeMode lattice_mode_for(const RealizationSpec& g);

bool in_cochar_lattice(LatticeMode m, const QVec& lambda);

struct HeckeResult {
  std::vector<QVec> weights;
  QVec degrees;
};

HeckeResult hecke_transform(const std::vector<QVec>& weights, const std::vector<QVec>& lambdas, const QVec& degrees,
                            LatticeMode mode);
ParabolicHiggsData hecke_transform(const ParabolicHiggsData& d, const std::vector<QVec>& lambdas);

struct GenericityResult {
  bool generic = true;
  std::string character;  // description of the wall character
  Q value;
  std::vector<std::vector<int>> positions;  // chosen coordinates per marked point
};

GenericityResult genericity_check(const std::vector<QVec>& weights, bool include_determinant);

}  // namespace phb
