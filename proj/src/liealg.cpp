#include "phb/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <unsupported/Eigen/MatrixFunctions>

namespace phb {

namespace {

const cd I(0.0, 1.0);

CMat unit_matrix(int n, int i, int j, cd c = 1.0) {
  CMat m = CMat::Zero(n, n);
  m(i, j) = c;
  return m;
}

CMat antidiag_identity(int n) {
  CMat s = CMat::Zero(n, n);
  for (int i = 0; i < n; ++i) s(i, n - 1 - i) = 1.0;
  return s;
}

CMat signature_matrix(int p, int q) {
  CMat j = CMat::Identity(p + q, p + q);
  for (int i = p; i < p + q; ++i) j(i, i) = -1.0;
  return j;
}

RVec realify(const CMat& m) {
  RVec v(2 * m.size());
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    v(2 * k) = m.data()[k].real();
    v(2 * k + 1) = m.data()[k].imag();
  }
  return v;
}

// Keeps candidates that are R-linearly independent of those already kept.
std::vector<CMat> greedy_real_basis(const std::vector<CMat>& cands) {
  std::vector<CMat> kept;
  std::vector<RVec> ortho;
  for (const auto& c : cands) {
    RVec v = realify(c);
    double n0 = v.norm();
    if (n0 < 1e-12) continue;
    for (const auto& o : ortho) v -= o.dot(v) * o;
    if (v.norm() > 1e-9 * n0) {
      ortho.push_back(v / v.norm());
      kept.push_back(c);
    }
  }
  return kept;
}

// Orthonormal basis (real inner product Re tr(A B^*)) of the real span.
std::vector<CMat> real_onb(const std::vector<CMat>& mats) {
  std::vector<CMat> out;
  for (const auto& m : mats) {
    CMat v = m;
    for (const auto& o : out) v -= (o.adjoint() * v).trace().real() * o;
    double nv = v.norm();
    if (nv > 1e-9 * std::max(1.0, m.norm())) out.push_back(v / nv);
  }
  return out;
}

bool is_complex_valued(const CMat& m) { return m.imag().norm() > 1e-12 * std::max(1.0, m.norm()); }

}  // namespace

CMat matrix_exp(const CMat& a) { return a.exp(); }
CMat matrix_log(const CMat& a) { return a.log(); }

cd pfaffian(const CMat& a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return 1.0;
  if (n % 2) return 0.0;
  cd total = 0.0;
  for (int j = 1; j < n; ++j) {
    if (a(0, j) == cd(0.0)) continue;
    std::vector<int> keep;
    for (int k = 1; k < n; ++k)
      if (k != j) keep.push_back(k);
    CMat sub(n - 2, n - 2);
    for (int r = 0; r < n - 2; ++r)
      for (int c = 0; c < n - 2; ++c) sub(r, c) = a(keep[r], keep[c]);
    double sign = (j % 2 == 1) ? 1.0 : -1.0;
    total += sign * a(0, j) * pfaffian(sub);
  }
  return total;
}

// ---------------------------------------------------------------- realizations

CMat ReductiveRealization::sigma(const CMat& x) const {
  switch (spec.group) {
    case Group::GLC:
    case Group::SLC:
      return x;
    case Group::U:
    case Group::SU:
      return -x.adjoint();
    case Group::SLR:
      if (spec.model == Model::Standard) return x.conjugate();
      {
        CMat s = antidiag_identity(N);
        return s * x.conjugate() * s;
      }
    case Group::SUpq: {
      CMat j = signature_matrix(spec.p, spec.q);
      return -j * x.adjoint() * j;
    }
  }
  return x;
}

CMat ReductiveRealization::theta(const CMat& x) const {
  if (complex_group) return -x.adjoint();
  return sigma(tau(x));
}

bool ReductiveRealization::valid_torus_coords(const RVec& d, double tol) const {
  if (d.size() != N) return false;
  if (traceless && std::abs(d.sum()) > tol) return false;
  if (spec.group == Group::SLR) {
    if (spec.model == Model::Standard) {
      for (int k = 0; k + 1 < N; k += 2)
        if (std::abs(d(k) + d(k + 1)) > tol) return false;
      if (N % 2 && std::abs(d(N - 1)) > tol) return false;
    } else {
      for (int k = 0; k < N; ++k)
        if (std::abs(d(k) + d(N - 1 - k)) > tol) return false;
    }
  }
  return true;
}

CMat ReductiveRealization::torus_element(const RVec& d) const {
  CMat D = CMat::Zero(N, N);
  for (int k = 0; k < N; ++k) D(k, k) = d(k);
  return torus_frame * D * torus_frame.adjoint();
}

int ReductiveRealization::torus_rank() const {
  switch (spec.group) {
    case Group::GLC:
    case Group::U:
      return N;
    case Group::SLR:
      return N / 2;
    default:
      return N - 1;
  }
}

std::vector<RVec> ReductiveRealization::m_weights() const {
  std::vector<RVec> w;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (i == j) continue;
      CMat e = torus_frame * unit_matrix(N, i, j) * torus_frame.adjoint();
      if (project(mC_basis, e).norm() < 1e-9) continue;
      RVec c = RVec::Zero(N);
      c(i) = 1;
      c(j) = -1;
      w.push_back(c);
    }
  return w;
}

CMat ReductiveRealization::project(const std::vector<CMat>& onb, const CMat& x) const {
  CMat out = CMat::Zero(x.rows(), x.cols());
  for (const auto& b : onb) out += (b.adjoint() * x).trace() * b;
  return out;
}

bool ReductiveRealization::in_real_form(const CMat& x, double tol) const {
  if (complex_group) return project(gC_basis, x).isApprox(x, tol) || (project(gC_basis, x) - x).norm() < tol;
  double scale = std::max(1.0, x.norm());
  if ((sigma(x) - x).norm() > tol * scale) return false;
  if (traceless && std::abs(x.trace()) > tol * scale) return false;
  return true;
}

ReductiveRealization build_realization(const RealizationSpec& spec) {
  ReductiveRealization r;
  r.spec = spec;
  switch (spec.group) {
    case Group::GLC:
      r.N = spec.n, r.complex_group = true, r.label = "GL(" + std::to_string(spec.n) + ",C)";
      break;
    case Group::SLC:
      r.N = spec.n, r.complex_group = true, r.traceless = true;
      r.label = "SL(" + std::to_string(spec.n) + ",C)";
      break;
    case Group::U:
      r.N = spec.n, r.compact = true, r.label = "U(" + std::to_string(spec.n) + ")";
      break;
    case Group::SU:
      r.N = spec.n, r.compact = true, r.traceless = true;
      r.label = "SU(" + std::to_string(spec.n) + ")";
      break;
    case Group::SLR:
      r.N = spec.n, r.traceless = true;
      r.label = "SL(" + std::to_string(spec.n) + ",R)";
      if (spec.model == Model::SplitDiagonal) r.label += "[split-diagonal]";
      break;
    case Group::SUpq:
      r.N = spec.p + spec.q, r.traceless = true;
      r.label = "SU(" + std::to_string(spec.p) + "," + std::to_string(spec.q) + ")";
      if (spec.p < 1 || spec.q < 1) throw Error("UnsupportedGroup", "SU(p,q) needs p,q >= 1");
      break;
  }
  const int N = r.N;
  if (N < 1 || N > 8) throw Error("UnsupportedGroup", "matrix size must be in 1..8");
  if (r.traceless && N < 2) throw Error("UnsupportedGroup", "special groups need n >= 2");

  std::vector<CMat> cands;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      if (r.traceless && i == j) continue;
      cands.push_back(unit_matrix(N, i, j));
      cands.push_back(unit_matrix(N, i, j, I));
    }
  if (r.traceless) {
    for (int k = 0; k + 1 < N; ++k) {
      CMat h = unit_matrix(N, k, k) - unit_matrix(N, k + 1, k + 1);
      cands.push_back(h);
      cands.push_back(I * h);
    }
  } else {
    for (int k = 0; k < N; ++k) {
      cands.push_back(unit_matrix(N, k, k));
      cands.push_back(unit_matrix(N, k, k, I));
    }
  }

  r.gC_basis = span_basis(cands);
  if (r.complex_group) {
    r.g_basis = greedy_real_basis(cands);
  } else {
    std::vector<CMat> proj;
    for (const auto& c : cands) proj.push_back(0.5 * (c + r.sigma(c)));
    r.g_basis = greedy_real_basis(proj);
  }
  std::vector<CMat> hc, mc;
  for (const auto& y : r.g_basis) {
    CMat t = -y.adjoint();  // theta on g
    hc.push_back(0.5 * (y + t));
    mc.push_back(0.5 * (y - t));
  }
  r.h_basis = greedy_real_basis(hc);
  r.m_basis = greedy_real_basis(mc);
  if (r.complex_group) {
    r.hC_basis = r.gC_basis;
    r.mC_basis = r.gC_basis;
  } else {
    r.hC_basis = span_basis(r.h_basis);
    r.mC_basis = span_basis(r.m_basis);
  }

  r.torus_frame = CMat::Identity(N, N);
  if (spec.group == Group::SLR && spec.model == Model::Standard) {
    const double s = 1.0 / std::sqrt(2.0);
    for (int k = 0; k + 1 < N; k += 2) {
      r.torus_frame(k, k) = s;
      r.torus_frame(k, k + 1) = s;
      r.torus_frame(k + 1, k) = I * s;
      r.torus_frame(k + 1, k + 1) = -I * s;
    }
  }
  return r;
}

const std::vector<CMat>& target_basis(const ReductiveRealization& r, Target t) {
  switch (t) {
    case Target::hC:
      return r.hC_basis;
    case Target::mC:
      return r.mC_basis;
    default:
      return r.gC_basis;
  }
}

// ---------------------------------------------------------------- eigenspaces

std::vector<Eigenspace> eigen_split(const ReductiveRealization& r, const CMat& s, Target target,
                                    double cluster_tol) {
  const int N = r.N;
  if (s.rows() != N || s.cols() != N) throw Error("DimensionMismatch", "element size");
  CMat V, Vinv;
  RVec d(N);
  if (is_hermitian(s, 1e-12)) {
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (s + s.adjoint()));
    V = es.eigenvectors();
    Vinv = V.adjoint();
    d = es.eigenvalues();
  } else {
    Eigen::ComplexEigenSolver<CMat> es(s);
    for (int k = 0; k < N; ++k) {
      if (std::abs(es.eigenvalues()(k).imag()) > 1e-9 * std::max(1.0, s.norm()))
        throw Error("NotSemisimpleReal", "element has non-real eigenvalues");
      d(k) = es.eigenvalues()(k).real();
    }
    V = es.eigenvectors();
    Eigen::FullPivLU<CMat> lu(V);
    if (lu.rank() < N || (V * d.cast<cd>().asDiagonal() * lu.inverse() - s).norm() >
                             1e-8 * std::max(1.0, s.norm()))
      throw Error("NotSemisimpleReal", "element is not diagonalizable");
    Vinv = lu.inverse();
  }

  std::vector<double> mus;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) mus.push_back(d(i) - d(j));
  std::sort(mus.begin(), mus.end());
  std::vector<double> clusters;
  for (double m : mus)
    if (clusters.empty() || m - clusters.back() > cluster_tol) clusters.push_back(m);
  // snap cluster representatives to the mean of their members
  std::vector<double> reps;
  for (double c : clusters) {
    double sum = 0;
    int cnt = 0;
    for (double m : mus)
      if (std::abs(m - c) <= cluster_tol * 2) sum += m, ++cnt;
    reps.push_back(sum / cnt);
  }

  const auto& tb = target_basis(r, target);
  std::vector<Eigenspace> out;
  size_t total = 0;
  for (double mu : reps) {
    std::vector<CMat> imgs;
    for (const auto& b : tb) {
      CMat c = Vinv * b * V;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j)
          if (std::abs(d(i) - d(j) - mu) > cluster_tol * 2) c(i, j) = 0.0;
      imgs.push_back(V * c * Vinv);
    }
    auto basis = span_basis(imgs);
    if (basis.empty()) continue;
    total += basis.size();
    out.push_back({std::abs(mu) < cluster_tol ? 0.0 : mu, basis});
  }
  if (total != tb.size())
    throw Error("NotInCartan", "eigenspaces do not reconstruct the target; ad(s) does not preserve it");
  return out;
}

std::vector<Eigenspace> ad_eigendecompose(const ReductiveRealization& r, const RVec& d, Target target) {
  if (!r.valid_torus_coords(d)) throw Error("NotInCartan", "coordinates violate the torus pattern of " + r.label);
  return eigen_split(r, r.torus_element(d), target);
}

// ---------------------------------------------------------------- Jordan

namespace {

struct SpectralBlocks {
  CMat V, Vinv;
  std::vector<cd> lambda;  // one per block
  std::vector<int> mult;
};

SpectralBlocks generalized_eigenspaces(const CMat& a, double defect_tol) {
  const int n = static_cast<int>(a.rows());
  Eigen::ComplexEigenSolver<CMat> es(a, false);
  std::vector<cd> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  const double scale = std::max(1.0, a.norm());
  // Cluster eigenvalues: defective blocks split to O(eps^(1/m)).
  std::vector<std::vector<cd>> groups;
  std::vector<bool> used(n, false);
  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<cd> g{ev[i]};
    used[i] = true;
    bool grew = true;
    while (grew) {
      grew = false;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        for (const auto& x : g)
          if (std::abs(ev[j] - x) < 1e-5 * scale) {
            g.push_back(ev[j]);
            used[j] = true;
            grew = true;
            break;
          }
      }
    }
    groups.push_back(g);
  }
  SpectralBlocks sb;
  sb.V = CMat(n, n);
  int col = 0;
  for (const auto& g : groups) {
    const int m = static_cast<int>(g.size());
    cd lam = 0.0;
    for (const auto& x : g) lam += x;
    lam /= double(m);
    CMat p = CMat::Identity(n, n);
    CMat shifted = a - lam * CMat::Identity(n, n);
    for (int k = 0; k < m; ++k) p = p * shifted;
    Eigen::JacobiSVD<CMat> svd(p, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double small = sv(n - m);
    double big = (n - m - 1 >= 0) ? sv(n - m - 1) : 1.0;
    if (small > defect_tol * std::pow(scale, m) * 1e-2 && small > 1e-3 * big)
      throw Error("NumericallyDefective", "generalized eigenspace is not numerically separated",
                  ErrorClass::Convergence);
    sb.V.middleCols(col, m) = svd.matrixV().rightCols(m);
    sb.lambda.push_back(lam);
    sb.mult.push_back(m);
    col += m;
  }
  Eigen::FullPivLU<CMat> lu(sb.V);
  if (lu.rank() < n)
    throw Error("NumericallyDefective", "generalized eigenvectors are dependent", ErrorClass::Convergence);
  sb.Vinv = lu.inverse();
  // refine each eigenvalue by the trace of the restricted block
  CMat blk = sb.Vinv * a * sb.V;
  col = 0;
  for (size_t k = 0; k < sb.lambda.size(); ++k) {
    sb.lambda[k] = blk.block(col, col, sb.mult[k], sb.mult[k]).trace() / double(sb.mult[k]);
    col += sb.mult[k];
  }
  return sb;
}

CMat from_blocks(const SpectralBlocks& sb, const std::vector<cd>& vals) {
  const int n = static_cast<int>(sb.V.rows());
  CMat D = CMat::Zero(n, n);
  int col = 0;
  for (size_t k = 0; k < vals.size(); ++k)
    for (int i = 0; i < sb.mult[k]; ++i, ++col) D(col, col) = vals[k];
  return sb.V * D * sb.Vinv;
}

CMat maybe_real(const CMat& m, bool real_input) {
  if (!real_input) return m;
  return m.real().cast<cd>();
}

}  // namespace

JordanFactors jordan_multiplicative(const CMat& g, double defect_tol) {
  const int n = static_cast<int>(g.rows());
  if (Eigen::FullPivLU<CMat>(g).rank() < n) throw Error("NotInvertible", "matrix is singular");
  const bool real_input = !is_complex_valued(g);
  auto sb = generalized_eigenspaces(g, defect_tol);
  std::vector<cd> phase, modulus;
  for (const auto& l : sb.lambda) {
    phase.push_back(l / std::abs(l));
    modulus.push_back(std::abs(l));
  }
  JordanFactors jf;
  jf.g_e = maybe_real(from_blocks(sb, phase), real_input);
  jf.g_h = maybe_real(from_blocks(sb, modulus), real_input);
  CMat s = from_blocks(sb, sb.lambda);
  jf.g_u = maybe_real(s.inverse() * g, real_input);
  double scale = std::max(1.0, g.norm());
  // g_u = s^{-1} g loses a factor of the condition number of g
  double tol = std::max(1e-9, 1e-14 * g.norm() * g.inverse().norm()) * scale;
  if ((jf.g_e * jf.g_h * jf.g_u - g).norm() > tol || bracket(jf.g_e, jf.g_u).norm() > tol ||
      bracket(jf.g_h, jf.g_u).norm() > tol)
    throw Error("NumericallyDefective", "Jordan factors fail reconstruction", ErrorClass::Convergence);
  return jf;
}

AdditiveJordan jordan_additive(const CMat& a, double defect_tol) {
  const bool real_input = !is_complex_valued(a);
  if (a.norm() == 0.0) return {a, a};
  auto sb = generalized_eigenspaces(a, defect_tol);
  AdditiveJordan aj;
  aj.semisimple = maybe_real(from_blocks(sb, sb.lambda), real_input);
  aj.nilpotent = a - aj.semisimple;
  if (aj.nilpotent.norm() < 1e-12 * std::max(1.0, a.norm())) aj.nilpotent.setZero();
  return aj;
}

// ---------------------------------------------------------------- triples

std::string flavor_name(Flavor f) {
  switch (f) {
    case Flavor::Plain:
      return "plain";
    case Flavor::Normal:
      return "normal";
    case Flavor::KSReal:
      return "kostant_sekiguchi_real";
    case Flavor::KSNormal:
      return "kostant_sekiguchi_normal";
  }
  return "?";
}

double bracket_defect(const SL2Triple& t) {
  return (bracket(t.x, t.e) - 2.0 * t.e).norm() + (bracket(t.x, t.f) + 2.0 * t.f).norm() +
         (bracket(t.e, t.f) - t.x).norm();
}

bool is_nilpotent(const CMat& e, double tol) {
  const int n = static_cast<int>(e.rows());
  double scale = std::max(1.0, e.norm());
  CMat p = CMat::Identity(n, n);
  for (int k = 0; k < n; ++k) p = p * e;
  return p.norm() <= tol * std::pow(scale, n);
}

namespace {

CMat solve_in_span(const std::vector<CMat>& basis, const std::function<CMat(const CMat&)>& op,
                   const CMat& rhs, double* residual) {
  const int n = static_cast<int>(rhs.rows());
  CMat A(n * n, basis.size());
  for (size_t k = 0; k < basis.size(); ++k) A.col(k) = vec(op(basis[k]));
  // SVD: the complex orthogonal-decomposition solve in Eigen 3.4 is wrong on rank-deficient input
  Eigen::JacobiSVD<CMat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(1e-11);
  CVec c = svd.solve(vec(rhs));
  CMat sol = CMat::Zero(n, n);
  for (size_t k = 0; k < basis.size(); ++k) sol += c(k) * basis[k];
  *residual = (vec(op(sol)) - vec(rhs)).norm();
  return sol;
}

}  // namespace

SL2Triple complete_triple(const CMat& e, const std::vector<CMat>& xspace, const std::vector<CMat>& fspace) {
  (void)xspace;
  const double scale = std::max(1.0, e.norm());
  double res = 0;
  auto ad2 = [&](const CMat& f) { return bracket(e, bracket(e, f)); };
  CMat f0 = solve_in_span(fspace, ad2, -2.0 * e, &res);
  if (res > 1e-8 * scale) throw Error("NoSolution", "e is not in [e,[e,g]] for the given spaces");
  CMat x = bracket(e, f0);

  // correct f inside ker ad(e) so that [x,f] = -2f
  const int n = static_cast<int>(e.rows());
  CMat K(n * n, fspace.size());
  for (size_t k = 0; k < fspace.size(); ++k) K.col(k) = vec(bracket(e, fspace[k]));
  CMat coeffs = null_space(K, 1e-10);
  std::vector<CMat> kern;
  for (int c = 0; c < coeffs.cols(); ++c) {
    CMat z = CMat::Zero(n, n);
    for (size_t k = 0; k < fspace.size(); ++k) z += coeffs(k, c) * fspace[k];
    kern.push_back(z);
  }
  CMat r = bracket(x, f0) + 2.0 * f0;
  CMat f = f0;
  if (r.norm() > 1e-13 * scale && !kern.empty()) {
    auto op = [&](const CMat& z) { return CMat(bracket(x, z) + 2.0 * z); };
    CMat z = solve_in_span(kern, op, -r, &res);
    f = f0 + z;
  }
  SL2Triple t{x, e, f, Flavor::Plain};
  if (bracket_defect(t) > 1e-8 * scale * scale)
    throw Error("NoSolution", "could not complete e to an sl2-triple", ErrorClass::Convergence);
  return t;
}

namespace {

// Gauss-Newton on the bracket relations, moving x, e, f along real directions.
SL2Triple polish_triple(SL2Triple t, const std::vector<CMat>& dirs, int max_iter = 50) {
  const int n = static_cast<int>(t.e.rows());
  const int p = static_cast<int>(dirs.size());
  auto residual = [&](const SL2Triple& s) {
    CVec out(3 * n * n);
    out << vec(bracket(s.x, s.e) - 2.0 * s.e), vec(bracket(s.x, s.f) + 2.0 * s.f), vec(bracket(s.e, s.f) - s.x);
    return out;
  };
  for (int it = 0; it < max_iter; ++it) {
    CVec res = residual(t);
    if (res.norm() < 1e-13 * std::max(1.0, t.e.squaredNorm())) break;
    CMat J(3 * n * n, 3 * p);
    for (int k = 0; k < p; ++k) {
      const CMat& z = dirs[k];
      CVec cx(3 * n * n), ce(3 * n * n), cf(3 * n * n);
      CMat zero = CMat::Zero(n, n);
      cx << vec(bracket(z, t.e)), vec(bracket(z, t.f)), vec(-z);
      ce << vec(bracket(t.x, z) - 2.0 * z), vec(zero), vec(bracket(z, t.f));
      cf << vec(zero), vec(bracket(t.x, z) + 2.0 * z), vec(bracket(t.e, z));
      J.col(k) = cx, J.col(p + k) = ce, J.col(2 * p + k) = cf;
    }
    RMat Jr(6 * n * n, 3 * p);
    Jr << J.real(), J.imag();
    RVec rr(6 * n * n);
    rr << res.real(), res.imag();
    Eigen::JacobiSVD<RMat> svd(Jr, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);
    RVec d = svd.solve(-rr);
    for (int k = 0; k < p; ++k) {
      t.x += d(k) * dirs[k];
      t.e += d(p + k) * dirs[k];
      t.f += d(2 * p + k) * dirs[k];
    }
  }
  return t;
}

}  // namespace

SL2Triple jacobson_morozov(const ReductiveRealization& r, const CMat& e) {
  if (e.norm() < 1e-14) throw Error("ZeroElement", "Jacobson-Morozov needs a nonzero nilpotent");
  if (!is_nilpotent(e)) throw Error("NotNilpotent", "e^N is not zero");
  SL2Triple t;
  try {
    t = complete_triple(e, r.gC_basis, r.gC_basis);
  } catch (const Error&) {
    // e is nilpotent only up to rounding (e.g. a logarithm of a computed unipotent):
    // least-squares completion, then move to a nearby exact triple
    const double scale = std::max(1.0, e.norm());
    double res = 0;
    auto ad2 = [&](const CMat& f) { return CMat(bracket(e, bracket(e, f))); };
    CMat f0 = solve_in_span(r.gC_basis, ad2, -2.0 * e, &res);
    if (res > 1e-5 * scale) throw;
    std::vector<CMat> dirs;
    const bool real = !r.complex_group && r.in_real_form(e, 1e-6);
    if (real) {
      dirs = r.g_basis;
      f0 = 0.5 * (f0 + r.sigma(f0));
    } else {
      for (const auto& b : r.gC_basis) dirs.push_back(b), dirs.push_back(I * b);
    }
    CMat e0 = real ? CMat(0.5 * (e + r.sigma(e))) : e;
    t = polish_triple({bracket(e0, f0), e0, f0, Flavor::Plain}, dirs);
    if (bracket_defect(t) > 1e-10 * scale * scale || (t.e - e).norm() > 1e-5 * scale)
      throw Error("NoSolution", "could not complete e to an sl2-triple", ErrorClass::Convergence);
    return t;
  }
  if (!r.complex_group && r.in_real_form(e, 1e-9)) {
    SL2Triple p{0.5 * (t.x + r.sigma(t.x)), e, 0.5 * (t.f + r.sigma(t.f)), Flavor::Plain};
    if (bracket_defect(p) < 1e-8 * std::max(1.0, e.squaredNorm())) t = p;
  }
  // polish: x = [e,f] exactly
  t.x = bracket(t.e, t.f);
  return t;
}

namespace {

double ks_residual(const ReductiveRealization& r, const SL2Triple& t, bool normal) {
  // on m^C sigma(e) = e^*; the adjoint form also covers complex groups, where sigma is trivial
  (void)r;
  if (normal) return (t.e.adjoint() - t.f).norm();
  return (r.theta(t.e) + t.f).norm();
}

SL2Triple conj(const CMat& g, const CMat& ginv, const SL2Triple& t) {
  return {g * t.x * ginv, g * t.e * ginv, g * t.f * ginv, t.flavor};
}

bool closed_form_sl2r(const ReductiveRealization& r, const SL2Triple& t, KSNormalization* out) {
  if (!(r.spec.group == Group::SLR && r.spec.model == Model::Standard && r.N == 2)) return false;
  if (is_complex_valued(t.x) || is_complex_valued(t.e) || is_complex_valued(t.f)) return false;
  Eigen::EigenSolver<RMat> es(t.x.real());
  RMat P(2, 2);
  int ip = es.eigenvalues()(0).real() > 0 ? 0 : 1;
  P.col(0) = es.eigenvectors().col(ip).real();
  P.col(1) = es.eigenvectors().col(1 - ip).real();
  double det = P.determinant();
  if (det < 0) P.col(1) *= -1.0, det = -det;
  P.col(1) /= det;
  RMat Pinv = P.inverse();
  RMat ec = Pinv * t.e.real() * P;
  double c = ec(0, 1);
  if (std::abs(c) < 1e-14) return false;
  RMat D = RMat::Zero(2, 2);
  D(0, 0) = 1.0 / std::sqrt(std::abs(c));
  D(1, 1) = std::sqrt(std::abs(c));
  RMat g = D * Pinv;
  CMat gc = g.cast<cd>();
  out->conjugator = gc;
  out->triple = conj(gc, gc.inverse(), t);
  out->triple.flavor = Flavor::KSReal;
  out->iterations = 0;
  return true;
}

}  // namespace

KSNormalization normalize_kostant_sekiguchi(const ReductiveRealization& r, const SL2Triple& in, double tol,
                                            int max_iter) {
  const double scale = std::max(1.0, in.e.norm());
  if (bracket_defect(in) > 1e-8 * scale * scale) throw Error("NotATriple", "bracket relations fail");
  const bool normal = (in.flavor == Flavor::Normal || in.flavor == Flavor::KSNormal);
  KSNormalization res{in, CMat::Identity(r.N, r.N), 0};
  res.triple.flavor = normal ? Flavor::KSNormal : Flavor::KSReal;
  if (ks_residual(r, in, normal) < tol) return res;
  if (!normal && closed_form_sl2r(r, in, &res)) return res;

  // descent directions: m (real case) or i*h (normal case), Hermitian
  std::vector<CMat> dirs;
  if (normal) {
    for (const auto& h : r.h_basis) dirs.push_back(I * h);
  } else {
    dirs = r.m_basis;
  }
  return normalize_kostant_sekiguchi(r, in, dirs, tol, max_iter);
}

KSNormalization normalize_kostant_sekiguchi(const ReductiveRealization& r, const SL2Triple& in,
                                            const std::vector<CMat>& directions, double tol, int max_iter) {
  const int N = r.N;
  const double scale = std::max(1.0, in.e.norm());
  if (bracket_defect(in) > 1e-8 * scale * scale) throw Error("NotATriple", "bracket relations fail");
  const bool normal = (in.flavor == Flavor::Normal || in.flavor == Flavor::KSNormal);
  KSNormalization res{in, CMat::Identity(N, N), 0};
  res.triple.flavor = normal ? Flavor::KSNormal : Flavor::KSReal;
  if (ks_residual(r, in, normal) < tol) return res;
  std::vector<CMat> dirs = real_onb(directions);
  if (dirs.empty()) throw Error("ConvergenceFailure", "no noncompact directions to move in", ErrorClass::Convergence);

  SL2Triple t = in;
  CMat g = CMat::Identity(N, N);
  auto energy = [](const SL2Triple& s) { return s.e.squaredNorm() + s.f.squaredNorm(); };
  auto gradient = [&](const SL2Triple& s, double* g2) {
    CMat M = bracket(s.e, s.e.adjoint()) + bracket(s.f, s.f.adjoint());
    CMat G = CMat::Zero(N, N);
    *g2 = 0;
    for (const auto& z : dirs) {
      double c = 2.0 * (z * M).trace().real();
      G += c * z;
      *g2 += c * c;
    }
    return G;
  };
  double eta = 0.1;
  for (int it = 0; it < max_iter; ++it) {
    if (ks_residual(r, t, normal) < tol) {
      res.triple = t;
      res.triple.flavor = normal ? Flavor::KSNormal : Flavor::KSReal;
      res.conjugator = g;
      res.iterations = it;
      return res;
    }
    double g2 = 0;
    CMat G = gradient(t, &g2);
    if (g2 < 1e-30) break;
    double e0 = energy(t);
    for (int ls = 0; ls < 60; ++ls) {
      CMat step = matrix_exp(-eta * G);
      CMat stepinv = matrix_exp(eta * G);
      SL2Triple cand = conj(step, stepinv, t);
      double e1 = energy(cand), c2 = 0;
      // near the minimum the energy decrease drops below rounding; fall back to the gradient norm
      bool accept = e1 <= e0 - 1e-4 * eta * g2;
      if (!accept && e1 <= e0 * (1 + 1e-13)) {
        gradient(cand, &c2);
        accept = c2 < g2;
      }
      if (accept) {
        t = cand;
        g = step * g;
        eta = std::min(eta * 1.5, 10.0);
        break;
      }
      eta *= 0.5;
    }
  }
  throw Error("ConvergenceFailure", "Kostant-Sekiguchi normalization did not converge", ErrorClass::Convergence);
}

SL2Triple cayley_transform(const ReductiveRealization& r, const SL2Triple& t) {
  (void)r;
  if (t.flavor != Flavor::KSReal) throw Error("FlavorMismatch", "Cayley transform needs a real Kostant-Sekiguchi triple");
  SL2Triple c;
  c.x = I * (t.f - t.e);
  c.e = 0.5 * (t.x + I * (t.e + t.f));
  c.f = 0.5 * (t.x - I * (t.e + t.f));
  c.flavor = Flavor::KSNormal;
  return c;
}

SL2Triple inverse_cayley_transform(const ReductiveRealization& r, const SL2Triple& t) {
  (void)r;
  if (t.flavor != Flavor::KSNormal) throw Error("FlavorMismatch", "inverse Cayley transform needs a normal Kostant-Sekiguchi triple");
  SL2Triple c;
  CMat d = t.e - t.f;
  c.e = 0.5 * (-I * d + I * t.x);
  c.f = 0.5 * (-I * d - I * t.x);
  c.x = t.e + t.f;
  c.flavor = Flavor::KSReal;
  return c;
}

namespace {

std::vector<double> sorted_spectrum(const CMat& m) {
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<CMat> es(m, false);
  std::vector<std::pair<double, double>> ev;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    double re = std::round(es.eigenvalues()(k).real() * 1e8) / 1e8;
    double im = std::round(es.eigenvalues()(k).imag() * 1e8) / 1e8;
    ev.push_back({re + 0.0, im + 0.0});
  }
  std::sort(ev.begin(), ev.end());
  std::vector<double> out;
  for (auto& p : ev) out.push_back(p.first), out.push_back(p.second);
  return out;
}

}  // namespace

std::vector<double> hC_invariants(const ReductiveRealization& r, const CMat& x) {
  std::vector<double> inv;
  if (r.spec.group == Group::SUpq) {
    auto a = sorted_spectrum(x.topLeftCorner(r.spec.p, r.spec.p));
    auto b = sorted_spectrum(x.bottomRightCorner(r.spec.q, r.spec.q));
    inv = a;
    inv.insert(inv.end(), b.begin(), b.end());
    return inv;
  }
  inv = sorted_spectrum(x);
  if (r.spec.group == Group::SLR && r.N % 2 == 0) {
    CMat a = (r.spec.model == Model::Standard) ? x : CMat(x * antidiag_identity(r.N));
    cd pf = pfaffian(a);
    inv.push_back(std::round(pf.real() * 1e8) / 1e8 + 0.0);
    inv.push_back(std::round(pf.imag() * 1e8) / 1e8 + 0.0);
  }
  return inv;
}

OrbitCertificate certificate_of(const ReductiveRealization& r, const SL2Triple& t) {
  OrbitCertificate c;
  c.x_invariants = hC_invariants(r, t.x);
  CMat p = CMat::Identity(r.N, r.N);
  for (int k = 1; k <= r.N; ++k) {
    p = p * t.e;
    c.rank_sequence.push_back(numeric_rank(p, 1e-8));
  }
  return c;
}

bool same_orbit(const OrbitCertificate& a, const OrbitCertificate& b, double tol) {
  if (a.rank_sequence != b.rank_sequence) return false;
  if (a.x_invariants.size() != b.x_invariants.size()) return false;
  for (size_t k = 0; k < a.x_invariants.size(); ++k)
    if (std::abs(a.x_invariants[k] - b.x_invariants[k]) > tol) return false;
  return true;
}

KSOrbitImage kostant_sekiguchi_orbit_map(const ReductiveRealization& r, const CMat& e) {
  KSOrbitImage img;
  const int N = r.N;
  if (e.norm() < 1e-12) {
    img.representative = CMat::Zero(N, N);
    img.normal_triple = {CMat::Zero(N, N), CMat::Zero(N, N), CMat::Zero(N, N), Flavor::KSNormal};
    img.certificate = certificate_of(r, img.normal_triple);
    return img;
  }
  if (!r.complex_group && !r.in_real_form(e, 1e-9)) throw Error("NotInRealForm", "e must lie in g");
  SL2Triple jm = jacobson_morozov(r, e);
  KSNormalization ks = normalize_kostant_sekiguchi(r, jm);
  img.normal_triple = cayley_transform(r, ks.triple);
  img.representative = img.normal_triple.e;
  img.certificate = certificate_of(r, img.normal_triple);
  return img;
}

SL2Triple normal_triple_through(const CMat& y, const std::vector<CMat>& hspace, const std::vector<CMat>& mspace) {
  SL2Triple t = complete_triple(y, hspace, mspace);
  t.flavor = Flavor::Normal;
  return t;
}

}  // namespace phb
