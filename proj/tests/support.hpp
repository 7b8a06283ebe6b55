#pragma once

// Random instance generators shared by the unit tests and the acceptance binary.

#include <numbers>
#include <random>
#include <string>

#include "phb/nahodge.hpp"

namespace phb::testing {

struct DictionaryInstance {
  std::string group;
  RealizationSpec spec;
  RVec alpha;
  CMat s, y;
};

inline RealizationSpec dictionary_group(int which) {
  RealizationSpec g;
  switch (which % 3) {
    case 0:
      g.group = Group::SLR, g.n = 2, g.model = Model::Standard;
      break;
    case 1:
      g.group = Group::GLC, g.n = 2;
      break;
    default:
      g.group = Group::SUpq, g.n = 2, g.p = 1, g.q = 1;
  }
  return g;
}

inline std::string dictionary_group_name(int which) {
  static const char* names[] = {"SL(2,R)", "GL(2,C)", "SU(1,1)"};
  return names[which % 3];
}

// Elements of span(basis) commuting with a.
inline std::vector<CMat> centralizer_in(const std::vector<CMat>& basis, const CMat& a) {
  const int N = static_cast<int>(a.rows());
  CMat A(N * N, basis.size());
  for (size_t k = 0; k < basis.size(); ++k) A.col(k) = vec(bracket(basis[k], a));
  CMat ns = null_space(A, 1e-10);
  std::vector<CMat> out;
  for (int c = 0; c < ns.cols(); ++c) {
    CMat z = CMat::Zero(N, N);
    for (size_t k = 0; k < basis.size(); ++k) z += ns(k, c) * basis[k];
    out.push_back(z);
  }
  return out;
}

// Random (alpha, s, Y) with s, Y in m^C fixed by Ad(exp(2 pi i alpha)), [s, Y] = 0.
inline DictionaryInstance random_dictionary_instance(std::mt19937& rng, int which) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> nd;
  DictionaryInstance inst;
  inst.spec = dictionary_group(which);
  inst.group = dictionary_group_name(which);
  auto r = build_realization(inst.spec);
  const int N = 2;
  inst.alpha = RVec::Zero(N);
  double u = unif(rng);
  double a = u < 0.35 ? 0.0 : (u < 0.6 ? 0.5 : 0.05 + 0.4 * unif(rng));
  if (inst.spec.group == Group::GLC) {
    inst.alpha << a + 0.3 * std::floor(3 * unif(rng)) / 3.0, 0.3 * std::floor(3 * unif(rng)) / 3.0;
    if (unif(rng) < 0.5) inst.alpha(1) = inst.alpha(0);  // integral difference: all of gl_2 survives
  } else {
    inst.alpha << a, -a;
  }
  CMat A = r.torus_element(inst.alpha);
  CMat E = matrix_exp(2.0 * std::numbers::pi * cd(0, 1) * A);
  auto rm = centralizer_in(r.mC_basis, E);
  auto rnd = [&](const std::vector<CMat>& basis) {
    CMat z = CMat::Zero(N, N);
    for (const auto& b : basis) z += cd(nd(rng), nd(rng)) * b;
    return z;
  };
  inst.s = CMat::Zero(N, N);
  inst.y = CMat::Zero(N, N);
  if (rm.empty()) return inst;
  std::vector<CMat> rm0;
  for (const auto& m : rm) rm0.push_back(m - (m.trace() / double(N)) * CMat::Identity(N, N));
  bool has_identity = false;
  for (const auto& m : rm) has_identity = has_identity || std::abs(m.trace()) > 1e-9;
  if (unif(rng) < 0.5) {
    inst.s = 0.3 * rnd(rm);
    return inst;
  }
  // nilpotent direction: root of det(u m1 + m2) for traceless m1, m2 in the centralizer
  CMat m1 = rnd(rm0), m2 = rnd(rm0);
  if (m1.norm() < 1e-9) return inst;
  cd c2 = m1.determinant(), c0 = m2.determinant();
  cd c1 = (m1 + m2).determinant() - c2 - c0;
  CMat y;
  if (std::abs(c2) < 1e-12) {
    y = m1;  // m1 itself is nilpotent
  } else {
    cd uu = (-c1 + std::sqrt(c1 * c1 - 4.0 * c2 * c0)) / (2.0 * c2);
    y = uu * m1 + m2;
  }
  if (!is_nilpotent(y, 1e-9) || y.norm() < 1e-6) return inst;
  inst.y = y / y.norm() * (0.5 + unif(rng));
  if (has_identity) inst.s = 0.3 * cd(nd(rng), nd(rng)) * CMat::Identity(N, N);
  return inst;
}

}  // namespace phb::testing
