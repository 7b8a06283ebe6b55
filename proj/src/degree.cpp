#include "phb/degree.hpp"

#include <algorithm>
#include <cmath>

namespace phb {

namespace {

// Orthonormalize the rows of m in the order last..first and return
// sum_i c_i sum_k |O_ik|^2 lambda_k.
double trace_sample(const std::vector<CVec>& rows, const RVec& c, const RVec& lambda) {
  const int n = static_cast<int>(rows.size());
  std::vector<CVec> o(n);
  for (int i = n - 1; i >= 0; --i) {
    CVec v = rows[i];
    for (int pass = 0; pass < 2; ++pass)
      for (int j = n - 1; j > i; --j) v -= o[j].dot(v) * o[j];
    double nv = v.norm();
    if (nv == 0.0) throw Error("NonConvergence", "degenerate Gram-Schmidt step", ErrorClass::Convergence);
    o[i] = v / nv;
  }
  double val = 0;
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) val += c(i) * std::norm(o[i](k)) * lambda(k);
  return val;
}

}  // namespace

RelativeDegreeResult relative_degree(const CMat& s, const CMat& sigma, double b_scale) {
  if (s.rows() != sigma.rows() || s.rows() != s.cols() || sigma.rows() != sigma.cols())
    throw Error("BadInput", "s and sigma must be square of equal size");
  if (!is_hermitian(s, 1e-10) || !is_hermitian(sigma, 1e-10))
    throw Error("BadInput", "relative degree needs elements with real ad-spectrum (Hermitian matrices)");
  const int n = static_cast<int>(s.rows());
  RelativeDegreeResult res;
  const double exact_pair = b_scale * (s * sigma).trace().real();
  const double scale = std::max(1.0, s.norm() * sigma.norm());

  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (s + s.adjoint()));
  Eigen::SelfAdjointEigenSolver<CMat> ev(0.5 * (sigma + sigma.adjoint()));
  RVec c = es.eigenvalues();  // ascending
  CMat Q = es.eigenvectors();
  RVec lambda = ev.eigenvalues().reverse();  // descending
  CMat V = ev.eigenvectors().rowwise().reverse();
  CMat C = V.adjoint() * Q;  // C(k,i) = v_k^* q_i

  // Row i of the working matrix is conj(C(:,i))^T e^{-t Lambda}.  Flag-preserving
  // column operations (adding later columns) put D = conj(C) into echelon form,
  // so after rescaling every row stays bounded as t grows.
  CMat D = C.conjugate();
  std::vector<int> pivot(n, -1);
  const double ptol = 1e-10;
  for (int i = n - 1; i >= 0; --i) {
    CVec d = D.col(i);
    std::vector<int> order;
    for (int j = n - 1; j > i; --j) order.push_back(j);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return pivot[a] > pivot[b]; });
    for (int j : order) d -= (d(pivot[j]) / D(pivot[j], j)) * D.col(j);
    int p = -1;
    for (int k = n - 1; k >= 0; --k)
      if (std::abs(d(k)) > ptol) {
        p = k;
        break;
      }
    if (p < 0) throw Error("NonConvergence", "echelon reduction lost rank", ErrorClass::Convergence);
    for (int k = p + 1; k < n; ++k) d(k) = 0.0;  // rounding residue would grow like e^{t gap}
    for (int j = i + 1; j < n; ++j)
      if (pivot[j] == p) throw Error("NonConvergence", "echelon pivots collide", ErrorClass::Convergence);
    D.col(i) = d;
    pivot[i] = p;
  }

  auto sample = [&](double t) {
    std::vector<CVec> rows(n);
    for (int i = 0; i < n; ++i) {
      CVec r(n);
      for (int k = 0; k < n; ++k) r(k) = D(k, i) * std::exp(-t * (lambda(k) - lambda(pivot[i])));
      rows[i] = r;
    }
    return b_scale * trace_sample(rows, c, lambda);
  };

  double gap = 0;
  for (int k = 0; k + 1 < n; ++k) {
    double g = lambda(k) - lambda(k + 1);
    if (g > 1e-12 && (gap == 0 || g < gap)) gap = g;
  }
  const double t_settle = gap > 0 ? 30.0 / gap : 1.0;

  bool converged = false;
  double prev = 0;
  for (int e = 0; e <= 20; ++e) {
    double t = std::ldexp(1.0, e);
    double v = sample(t);
    if (!res.t_trace.empty()) {
      res.max_increase = std::max(res.max_increase, v - prev);
      if (std::abs(v - prev) < 1e-9 * scale && t >= std::min(t_settle, std::ldexp(1.0, 20))) {
        res.t_trace.push_back({t, v});
        converged = true;
        break;
      }
    }
    res.t_trace.push_back({t, v});
    prev = v;
  }
  res.monotone = res.max_increase <= 1e-9 * scale;
  const bool commuting = bracket(s, sigma).norm() < 1e-12 * scale;
  if (commuting) {
    res.value = exact_pair;
    res.method = "commuting_closed_form";
    res.agreement = std::abs(res.t_trace.back().second - exact_pair);
    return res;
  }
  if (!converged)
    throw Error("NonConvergence", "relative degree trace still moving at t = 2^20", ErrorClass::Convergence);
  res.value = res.t_trace.back().second;
  res.method = "numeric_limit";
  return res;
}

void validate_flag(const WeightedFlag& f) {
  const int n = f.n();
  for (const auto& row : f.basis)
    if (static_cast<int>(row.size()) != n) throw Error("InconsistentFlag", "basis must be square");
  if (n == 0 || rank_q(f.basis) != n) throw Error("InconsistentFlag", "basis must be invertible");
  if (f.dims.empty() || f.dims.size() != f.weights.size())
    throw Error("InconsistentFlag", "one weight per step is required");
  int prev = 0;
  for (int d : f.dims) {
    if (d <= prev) throw Error("InconsistentFlag", "step dimensions must increase strictly");
    prev = d;
  }
  if (prev != n) throw Error("InconsistentFlag", "last step must be the whole space");
}

namespace {

QMat leading_columns(const QMat& basis, int k) {
  QMat out(basis.size(), QVec(k));
  for (size_t r = 0; r < basis.size(); ++r)
    for (int c = 0; c < k; ++c) out[r][c] = basis[r][c];
  return out;
}

int intersection_dim(const QMat& a, int ka, const QMat& b, int kb) {
  if (ka == 0 || kb == 0) return 0;
  QMat joined(a.size(), QVec(ka + kb));
  for (size_t r = 0; r < a.size(); ++r) {
    for (int c = 0; c < ka; ++c) joined[r][c] = a[r][c];
    for (int c = 0; c < kb; ++c) joined[r][ka + c] = b[r][c];
  }
  return ka + kb - rank_q(joined);
}

}  // namespace

Q relative_degree_filtration(const WeightedFlag& a, const WeightedFlag& b) {
  validate_flag(a);
  validate_flag(b);
  if (a.n() != b.n()) throw Error("InconsistentFlag", "flags live in different dimensions");
  const size_t p = a.dims.size(), q = b.dims.size();
  auto d = [&](size_t i, size_t j) -> int {  // i, j are 1-based step indices, 0 = zero space
    if (i == 0 || j == 0) return 0;
    return intersection_dim(leading_columns(a.basis, a.dims[i - 1]), a.dims[i - 1],
                            leading_columns(b.basis, b.dims[j - 1]), b.dims[j - 1]);
  };
  std::vector<std::vector<int>> dd(p + 1, std::vector<int>(q + 1));
  for (size_t i = 0; i <= p; ++i)
    for (size_t j = 0; j <= q; ++j) dd[i][j] = d(i, j);
  Q total = 0;
  for (size_t i = 1; i <= p; ++i)
    for (size_t j = 1; j <= q; ++j) {
      int m = dd[i][j] - dd[i - 1][j] - dd[i][j - 1] + dd[i - 1][j - 1];
      total += a.weights[i - 1] * b.weights[j - 1] * m;
    }
  return total;
}

CMat flag_element(const WeightedFlag& f) {
  validate_flag(f);
  const int n = f.n();
  CMat B(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) B(r, c) = to_double(f.basis[r][c]);
  Eigen::HouseholderQR<CMat> qr(B);
  CMat O = qr.householderQ();  // first k columns span V_k
  CMat s = CMat::Zero(n, n);
  int start = 0;
  for (size_t i = 0; i < f.dims.size(); ++i) {
    for (int k = start; k < f.dims[i]; ++k) s += to_double(f.weights[i]) * O.col(k) * O.col(k).adjoint();
    start = f.dims[i];
  }
  return 0.5 * (s + s.adjoint());
}

ParabolicDegree parabolic_degree(const std::vector<WeightedFlag>& alphas, const FlagReduction& red,
                                 bool numeric_cross_check) {
  const size_t k = red.ranks.size();
  if (red.degrees.size() != k || red.character.size() != k || k == 0)
    throw Error("IncompatibleRanks", "ranks, degrees and character must have equal length");
  if (red.fibre_bases.size() != alphas.size())
    throw Error("IncompatibleRanks", "one fibre position per marked point is required");
  int n = 0;
  std::vector<int> dims;
  for (int r : red.ranks) {
    if (r <= 0) throw Error("IncompatibleRanks", "graded pieces need positive rank");
    n += r;
    dims.push_back(n);
  }
  ParabolicDegree pd;
  pd.global = 0;
  for (size_t j = 0; j < k; ++j) pd.global += red.character[j] * red.degrees[j];
  pd.total = pd.global;
  double worst = 0;
  for (size_t i = 0; i < alphas.size(); ++i) {
    if (alphas[i].n() != n) throw Error("IncompatibleRanks", "weight flag rank differs from the bundle rank");
    WeightedFlag redflag{red.fibre_bases[i], dims, red.character};
    Q loc = relative_degree_filtration(alphas[i], redflag);
    pd.local.push_back(loc);
    pd.total -= loc;
    if (numeric_cross_check) {
      auto num = relative_degree(flag_element(alphas[i]), flag_element(redflag));
      worst = std::max(worst, std::abs(num.value - to_double(loc)));
    }
  }
  if (numeric_cross_check) pd.numeric_check = worst;
  return pd;
}

LocalSystemDegree local_system_degree(const std::vector<CMat>& betas, const CMat& s, const CMat* zeta,
                                      double b_scale) {
  LocalSystemDegree out{0.0, 0.0};
  for (const auto& b : betas) out.value -= relative_degree(b, s, b_scale).value;
  out.zeta_slope = out.value;
  if (zeta) out.zeta_slope -= b_scale * (*zeta * s).trace().real();
  return out;
}

}  // namespace phb
