#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phb/common.hpp"

namespace phb {

struct RelativeDegreeResult {
  double value = 0;
  std::vector<std::pair<double, double>> t_trace;  // (t, <s.e^{-t sigma}, sigma>)
  std::string method;                              // numeric_limit | commuting_closed_form | filtration_pairing
  std::optional<double> agreement;                 // cross-method discrepancy
  double max_increase = 0;                         // largest upward step in the trace
  bool monotone = true;                            // max_increase <= 1e-9
};

// mu_s(sigma) = lim <s . e^{-t sigma}, sigma> for Hermitian s, sigma, where the
// right action of g = p h (p in P_s, h unitary) is Ad(h^{-1}) s.  The pairing is
// b_scale * Re tr.  Works for any realization whose m (or i*h) consists of
// Hermitian matrices, since G/H sits totally geodesically in GL_N/U_N.
RelativeDegreeResult relative_degree(const CMat& s, const CMat& sigma, double b_scale = 1.0);

// A weighted flag of C^n: V_i = span of the first dims[i] columns of basis,
// with weight weights[i] on V_i / V_{i-1}.
struct WeightedFlag {
  QMat basis;  // n x n, columns
  std::vector<int> dims;
  QVec weights;
  int n() const { return static_cast<int>(basis.size()); }
};

void validate_flag(const WeightedFlag& f);

// sum_ij a_i b_j m_ij with m the graded dimensions of the double filtration.
// Equals the relative degree of the corresponding elements when both flags
// list their weights in nondecreasing order.
Q relative_degree_filtration(const WeightedFlag& a, const WeightedFlag& b);

// Hermitian element with eigenvalue weights[i] on the orthogonal complement
// of V_{i-1} in V_i.
CMat flag_element(const WeightedFlag& f);

// A reduction of a rank-n bundle to a filtration E_1 c ... c E_k = E, with
// degrees of the graded pieces, a character (weights c_j on gr_j) and the
// position of the filtration in the fibre at each marked point.
struct FlagReduction {
  std::vector<int> ranks;       // ranks of gr_j
  QVec degrees;                 // degrees of gr_j (rational after half-lattice Hecke shifts)
  QVec character;               // c_j
  std::vector<QMat> fibre_bases;  // per marked point: columns adapted to the filtration
};

struct ParabolicDegree {
  Q global;
  std::vector<Q> local;  // relative degree at each marked point
  Q total;               // global - sum(local)
  std::optional<double> numeric_check;  // max |exact - numeric| over marked points
};

// alphas[i] is the parabolic weight at x_i as a weighted flag.
ParabolicDegree parabolic_degree(const std::vector<WeightedFlag>& alphas, const FlagReduction& red,
                                 bool numeric_cross_check = false);

struct LocalSystemDegree {
  double value;       // -sum_i mu(beta_i, s)
  double zeta_slope;  // value - <zeta, s>
};

LocalSystemDegree local_system_degree(const std::vector<CMat>& betas, const CMat& s,
                                      const CMat* zeta = nullptr, double b_scale = 1.0);

}  // namespace phb
