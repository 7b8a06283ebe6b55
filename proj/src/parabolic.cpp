#include "phb/parabolic.hpp"

#include <cmath>
#include <set>

namespace phb {

namespace {

std::vector<CMat> concat_where(const std::vector<Eigenspace>& es, auto pred) {
  std::vector<CMat> out;
  for (const auto& e : es)
    if (pred(e.mu)) out.insert(out.end(), e.basis.begin(), e.basis.end());
  return out;
}

bool near_integer(double x, double tol) { return std::abs(x - std::round(x)) < tol; }

}  // namespace

ParabolicDatum parabolic_from(const ReductiveRealization& r, const CMat& s, Target target, double cluster_tol) {
  ParabolicDatum pd;
  pd.s = s;
  pd.target = target;
  pd.spaces = eigen_split(r, s, target, cluster_tol);
  pd.p_basis = concat_where(pd.spaces, [](double mu) { return mu <= 0.0; });
  pd.l_basis = concat_where(pd.spaces, [](double mu) { return mu == 0.0; });
  pd.n_basis = concat_where(pd.spaces, [](double mu) { return mu < 0.0; });
  return pd;
}

std::vector<CMat> p1_subalgebra(const ReductiveRealization& r, const CMat& alpha, Target target) {
  auto es = eigen_split(r, alpha, target);
  return concat_where(es, [](double mu) { return std::abs(mu + 1.0) < 1e-9; });
}

LeviCentralizer levi_centralizer_tilde(const ReductiveRealization& r, const CMat& alpha) {
  LeviCentralizer lc;
  auto m = eigen_split(r, alpha, Target::mC);
  auto h = eigen_split(r, alpha, Target::hC);
  lc.m_tilde = concat_where(m, [](double mu) { return near_integer(mu, 1e-9); });
  lc.h_tilde = concat_where(h, [](double mu) { return near_integer(mu, 1e-9); });
  lc.m0 = concat_where(m, [](double mu) { return mu == 0.0; });
  lc.l0 = concat_where(h, [](double mu) { return mu == 0.0; });
  return lc;
}

CMat torus_element_q(const ReductiveRealization& r, const QVec& coords) {
  RVec d(coords.size());
  for (size_t k = 0; k < coords.size(); ++k) d(k) = to_double(coords[k]);
  if (!r.valid_torus_coords(d)) throw Error("NotInCartan", "coordinates violate the torus pattern of " + r.label);
  return r.torus_element(d);
}

LeviCentralizer levi_centralizer_tilde(const ReductiveRealization& r, const QVec& coords) {
  // exact eigenvalue table: differences of coordinates
  std::set<Q> values;
  for (const auto& a : coords)
    for (const auto& b : coords) values.insert(a - b);
  std::vector<double> integers;
  for (const auto& v : values)
    if (is_integer(v)) integers.push_back(to_double(v));
  CMat alpha = torus_element_q(r, coords);
  // exact rationals separate clusters by at least 1/den^2; keep numeric clustering tight
  LeviCentralizer lc;
  auto m = eigen_split(r, alpha, Target::mC);
  auto h = eigen_split(r, alpha, Target::hC);
  auto is_exact_int = [&](double mu) {
    for (double z : integers)
      if (std::abs(mu - z) < 1e-9) return true;
    return false;
  };
  lc.m_tilde = concat_where(m, is_exact_int);
  lc.h_tilde = concat_where(h, is_exact_int);
  lc.m0 = concat_where(m, [](double mu) { return mu == 0.0; });
  lc.l0 = concat_where(h, [](double mu) { return mu == 0.0; });
  return lc;
}

}  // namespace phb
