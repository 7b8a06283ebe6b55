#include "phb/nahodge.hpp"

#include <algorithm>
#include <functional>
#include <numbers>

namespace phb {

namespace {

constexpr double kPi = std::numbers::pi;
const cd I(0.0, 1.0);

using LinearOp = std::function<CMat(const CMat&)>;

// Orthonormal (for Re tr(a^* b)) real basis of the span of the inputs.
std::vector<CMat> real_orthonormal(const std::vector<CMat>& in, double tol = 1e-10) {
  std::vector<CMat> out;
  for (const auto& v : in) {
    CMat w = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : out) w -= (u.adjoint() * w).trace().real() * u;
    double n = w.norm();
    if (n > tol) out.push_back(w / n);
  }
  return out;
}

// Real-linear combinations of dirs killed by every op.
std::vector<CMat> real_kernel(const std::vector<CMat>& dirs, const std::vector<LinearOp>& ops) {
  if (dirs.empty()) return {};
  if (ops.empty()) return real_orthonormal(dirs);
  const int N = static_cast<int>(dirs[0].rows());
  const int rows = static_cast<int>(ops.size()) * 2 * N * N;
  RMat A(rows, dirs.size());
  for (size_t k = 0; k < dirs.size(); ++k) {
    int row = 0;
    for (const auto& op : ops) {
      CVec v = vec(op(dirs[k]));
      for (int i = 0; i < v.size(); ++i) {
        A(row++, k) = v(i).real();
        A(row++, k) = v(i).imag();
      }
    }
  }
  Eigen::JacobiSVD<RMat> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = sv.size() ? sv(0) : 0.0;
  double tol = 1e-10 * std::max(1.0, top);
  std::vector<CMat> out;
  for (int c = 0; c < A.cols(); ++c) {
    if (c < sv.size() && sv(c) > tol) continue;
    CMat z = CMat::Zero(N, N);
    for (size_t k = 0; k < dirs.size(); ++k) z += svd.matrixV()(k, c) * dirs[k];
    out.push_back(z);
  }
  return real_orthonormal(out);
}

// Complex subspace of span(basis) killed by every op.
std::vector<CMat> complex_kernel(const std::vector<CMat>& basis, const std::vector<LinearOp>& ops) {
  if (basis.empty()) return {};
  const int N = static_cast<int>(basis[0].rows());
  CMat A(static_cast<int>(ops.size()) * N * N, basis.size());
  for (size_t k = 0; k < basis.size(); ++k) {
    int row = 0;
    for (const auto& op : ops) {
      CVec v = vec(op(basis[k]));
      A.block(row, k, v.size(), 1) = v;
      row += static_cast<int>(v.size());
    }
  }
  CMat ns = null_space(A, 1e-10);
  std::vector<CMat> out;
  for (int c = 0; c < ns.cols(); ++c) {
    CMat z = CMat::Zero(N, N);
    for (size_t k = 0; k < basis.size(); ++k) z += ns(k, c) * basis[k];
    out.push_back(z);
  }
  return out;
}

std::vector<CMat> hermitian_h_directions(const ReductiveRealization& r) {
  std::vector<CMat> d;
  for (const auto& h : r.h_basis) d.push_back(I * h);
  return d;
}

LinearOp commutator_with(const CMat& a) {
  return [a](const CMat& z) { return CMat(bracket(z, a)); };
}

// Moves `items` by exp of the Hermitian directions to a minimum of sum |x|^2.
CMat kempf_ness(const std::vector<CMat>& dirs, std::vector<CMat>& items, double tol = 1e-12, int max_iter = 20000) {
  const int N = static_cast<int>(items[0].rows());
  CMat g = CMat::Identity(N, N);
  if (dirs.empty()) return g;
  auto energy = [](const std::vector<CMat>& xs) {
    double e = 0;
    for (const auto& x : xs) e += x.squaredNorm();
    return e;
  };
  auto gradient = [&](const std::vector<CMat>& xs, double* g2) {
    CMat M = CMat::Zero(N, N);
    for (const auto& x : xs) M += bracket(x, x.adjoint());
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
    double g2 = 0;
    CMat G = gradient(items, &g2);
    double e0 = energy(items);
    if (std::sqrt(g2) < tol * std::max(1.0, e0)) return g;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      CMat step = matrix_exp(-eta * G), inv = matrix_exp(eta * G);
      std::vector<CMat> cand;
      for (const auto& x : items) cand.push_back(step * x * inv);
      double e1 = energy(cand), c2 = 0;
      bool accept = e1 <= e0 - 1e-4 * eta * g2;
      if (!accept && e1 <= e0 * (1 + 1e-13)) {  // below rounding: compare gradients
        gradient(cand, &c2);
        accept = c2 < g2;
      }
      if (accept) {
        items = cand;
        g = step * g;
        eta = std::min(eta * 1.5, 10.0);
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved) return g;  // at numerical minimum
  }
  throw Error("ConvergenceFailure", "tau-normal representative not reached", ErrorClass::Convergence);
}

CMat nilpotent_log(const CMat& u) {
  const int n = static_cast<int>(u.rows());
  CMat d = u - CMat::Identity(n, n);
  CMat p = d, out = CMat::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    out += ((k % 2) ? 1.0 : -1.0) / k * p;
    p = p * d;
  }
  return out;
}

CMat hermitian_log(const CMat& h) {
  CMat hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(hs);
  RVec l = es.eigenvalues();
  for (int k = 0; k < l.size(); ++k) {
    if (l(k) <= 0) throw Error("NumericallyDefective", "hyperbolic factor is not positive definite");
    l(k) = std::log(l(k));
  }
  return es.eigenvectors() * l.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

// Unitary diagonalization of a normal matrix.
void normal_eigen(const CMat& a, CMat& U, CVec& lambda) {
  Eigen::ComplexSchur<CMat> cs(a);
  U = cs.matrixU();
  lambda = cs.matrixT().diagonal();
}

double phase_fraction(cd z) {
  double t = std::arg(z) / (2 * kPi);
  if (t < 0) t += 1.0;
  if (t > 1.0 - 1e-10) t = 0.0;
  if (t < 1e-12) t = 0.0;
  return t;
}

}  // namespace

std::string convention_name(MonodromyConvention c) { return c == MonodromyConvention::RealScale ? "real-scale" : "imaginary-scale"; }

MonodromyConvention parse_convention(const std::string& s) {
  if (s == "real-scale") return MonodromyConvention::RealScale;
  if (s == "imaginary-scale") return MonodromyConvention::ImaginaryScale;
  throw Error("BadConvention", "unknown monodromy convention '" + s + "'");
}

cd convention_scale(MonodromyConvention c) { return c == MonodromyConvention::RealScale ? cd(2 * kPi) : cd(0, 2 * kPi); }

std::vector<cd> sorted_eigenvalues(const CMat& a) {
  Eigen::ComplexEigenSolver<CMat> es(a, false);
  std::vector<cd> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end(), [](cd x, cd y) {
    if (std::abs(x.real() - y.real()) > 1e-7) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return v;
}

double max_commutator(const JordanFactors& f) {
  return std::max({bracket(f.g_e, f.g_h).norm(), bracket(f.g_e, f.g_u).norm(), bracket(f.g_h, f.g_u).norm()});
}

RVec canonical_alcove_spectrum(const CMat& elliptic, bool traceless, bool* on_wall) {
  CMat U;
  CVec lam;
  normal_eigen(elliptic, U, lam);
  const int n = static_cast<int>(lam.size());
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) {
    if (std::abs(std::abs(lam(k)) - 1.0) > 1e-8) throw Error("NotElliptic", "eigenvalue off the unit circle");
    t[k] = phase_fraction(lam(k));
  }
  std::sort(t.begin(), t.end(), std::greater<double>());
  if (traceless) {
    double sum = 0;
    for (double x : t) sum += x;
    int m = static_cast<int>(std::lround(sum));
    if (std::abs(sum - m) > 1e-8) throw Error("NotInGroup", "determinant is not 1");
    for (int k = 0; k < m; ++k) t[k] -= 1.0;
    std::sort(t.begin(), t.end(), std::greater<double>());
  }
  RVec out(n);
  for (int k = 0; k < n; ++k) out(k) = t[k];
  if (on_wall) *on_wall = n > 1 && (out(0) - out(n - 1)) > 1.0 - 1e-9;
  return out;
}

OrbitCertificate y_orbit_certificate(const ReductiveRealization& r, const SL2Triple& t) {
  SL2Triple ey{-t.x, t.f, t.e, Flavor::KSNormal};
  return certificate_of(r, ey);
}

PunctureDictionaryEntry higgs_to_localsystem(const ReductiveRealization& r, const RVec& alpha, const CMat& s_in,
                                             const CMat& y_in, MonodromyConvention conv) {
  const int N = r.N;
  if (alpha.size() != N || !r.valid_torus_coords(alpha, 1e-10))
    throw Error("BadWeight", "alpha is not a torus element of the realization");
  const double scale = std::max(1.0, s_in.norm() + y_in.norm());
  auto in_m = [&](const CMat& x) { return (r.project(r.mC_basis, x) - x).norm() < 1e-9 * scale; };
  if (!in_m(s_in) || !in_m(y_in)) throw Error("NotInM", "s and Y must lie in m^C");
  if (bracket(s_in, y_in).norm() > 1e-9 * scale) throw Error("NotCommuting", "[s, Y] != 0");
  if (!is_nilpotent(y_in)) throw Error("NotNilpotent", "Y is not nilpotent");
  if (jordan_additive(s_in).nilpotent.norm() > 1e-8 * scale) throw Error("NotSemisimple", "s is not semisimple");

  PunctureDictionaryEntry d;
  d.alpha = alpha;
  d.alpha_matrix = r.torus_element(alpha);
  d.convention = conv;
  d.provenance = "higgs";
  const CMat E = matrix_exp(2.0 * kPi * I * d.alpha_matrix);
  if ((E * s_in * E.inverse() - s_in).norm() > 1e-9 * scale || (E * y_in * E.inverse() - y_in).norm() > 1e-9 * scale)
    throw Error("NotInCentralizer", "s and Y must be fixed by Ad(exp(2 pi i alpha))");

  // tau-normal representative of s inside the centralizer of exp(2 pi i alpha)
  auto dirs1 = real_kernel(hermitian_h_directions(r), {commutator_with(E)});
  std::vector<CMat> items{s_in};
  CMat g = CMat::Identity(N, N);
  if (s_in.norm() > 1e-14) g = kempf_ness(dirs1, items);
  d.s = items[0];
  CMat y = g * y_in * g.inverse();

  const int n = N;
  d.triple = {CMat::Zero(n, n), CMat::Zero(n, n), CMat::Zero(n, n), Flavor::KSNormal};
  if (y.norm() > 1e-12 * scale) {
    std::vector<LinearOp> cent{commutator_with(E), commutator_with(d.s)};
    auto rh = complex_kernel(r.hC_basis, cent);
    auto rm = complex_kernel(r.mC_basis, cent);
    SL2Triple t;
    try {
      t = complete_triple(y, rh, rm);
    } catch (const Error& e) {
      throw Error("TripleCompletionFailure", e.what());
    }
    SL2Triple hxy{-t.x, t.f, y, Flavor::Normal};
    auto dirs2 = real_kernel(hermitian_h_directions(r), cent);
    KSNormalization ks;
    try {
      ks = normalize_kostant_sekiguchi(r, hxy, dirs2);
    } catch (const Error& e) {
      throw Error("TripleCompletionFailure", e.what(), ErrorClass::Convergence);
    }
    d.triple = ks.triple;
    g = ks.conjugator * g;
  }
  d.conjugator = g;

  const CMat sstar = d.s.adjoint();
  d.beta = d.s + sstar;  // s - tau(s)
  const cd c = convention_scale(conv);
  CMat F = matrix_exp(c * (sstar - d.s));  // -s - tau(s) = s^* - s
  CMat U = matrix_exp(c * (d.triple.f - d.triple.x - d.triple.e));
  if (conv == MonodromyConvention::ImaginaryScale) {
    d.factors = {E, F, U};
  } else {
    d.factors = {E * F, CMat::Identity(n, n), U};
  }
  d.monodromy = E * F * U;
  return d;
}

HiggsSideRecovery localsystem_to_higgs(const ReductiveRealization& r, const CMat& M, const CMat* beta,
                                       MonodromyConvention conv) {
  const int N = r.N;
  HiggsSideRecovery out;
  out.factors = jordan_multiplicative(M);
  const auto& jf = out.factors;
  const bool traceless = r.traceless;
  CMat b;
  if (conv == MonodromyConvention::ImaginaryScale) {
    CMat U;
    CVec lam;
    normal_eigen(jf.g_e, U, lam);
    RVec t(N);
    for (int k = 0; k < N; ++k) t(k) = phase_fraction(lam(k));
    out.alpha_log = U * t.cast<cd>().asDiagonal() * U.adjoint();
    bool wall = false;
    out.alpha_spectrum = canonical_alcove_spectrum(jf.g_e, traceless, &wall);
    out.log_branch_ambiguous = wall;
    b = I * hermitian_log(jf.g_h) / (4 * kPi);
    out.nilpotent_log = nilpotent_log(jf.g_u) / (2 * kPi * I);
  } else {
    if ((jf.g_h - CMat::Identity(N, N)).norm() > 1e-8)
      out.note += "hyperbolic factor is nontrivial, which this convention does not produce; ";
    CMat U;
    CVec lam;
    normal_eigen(jf.g_e, U, lam);
    // inside repeated eigenvalues use a basis adapted to a generic element of i*h
    std::vector<double> t(N);
    std::vector<bool> done(N, false);
    const auto hdirs = hermitian_h_directions(r);
    CMat generic = CMat::Zero(N, N);
    for (size_t k = 0; k < hdirs.size(); ++k) generic += (0.37 + 0.61 * std::sin(1.0 + 2.3 * k)) * hdirs[k];
    for (int k = 0; k < N; ++k) {
      if (done[k]) continue;
      std::vector<int> idx;
      for (int j = k; j < N; ++j)
        if (!done[j] && std::abs(lam(j) - lam(k)) < 1e-8) idx.push_back(j), done[j] = true;
      if (idx.size() > 1) {
        CMat Uc(N, idx.size());
        for (size_t j = 0; j < idx.size(); ++j) Uc.col(j) = U.col(idx[j]);
        CMat comp = Uc.adjoint() * generic * Uc;
        Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (comp + comp.adjoint()));
        Uc = Uc * es.eigenvectors();
        for (size_t j = 0; j < idx.size(); ++j) U.col(idx[j]) = Uc.col(j);
      }
    }
    for (int k = 0; k < N; ++k) t[k] = phase_fraction(lam(k));
    if (N > 6) throw Error("NumericallyDefective", "rank too large for the branch search");
    if (r.complex_group) {
      out.alpha_log = U * RVec::Map(t.data(), N).cast<cd>().asDiagonal() * U.adjoint();
      b = CMat::Zero(N, N);
      out.log_branch_ambiguous = true;
      out.note += "h^C and m^C coincide for a complex group, so the elliptic factor cannot be split; ";
    } else {
      struct Cand {
        CMat ph, pm;
      };
      std::vector<Cand> good;
      int total = 1;
      for (int k = 0; k < N; ++k) total *= 3;
      for (int code = 0; code < total; ++code) {
        RVec tv(N);
        double tr = 0;
        int c = code;
        for (int k = 0; k < N; ++k) tv(k) = t[k] + (c % 3 - 1), c /= 3, tr += tv(k);
        if (traceless && std::abs(tr) > 1e-8) continue;
        CMat L = U * tv.cast<cd>().asDiagonal() * U.adjoint();
        CMat ph = r.project(r.hC_basis, L), pm = r.project(r.mC_basis, L);
        if ((ph + pm - L).norm() > 1e-8) continue;
        if (bracket(ph, pm).norm() > 1e-8) continue;
        good.push_back({ph, pm});
      }
      if (good.empty()) throw Error("LogBranchAmbiguity", "no logarithm splits into commuting h and m parts");
      std::sort(good.begin(), good.end(), [](const Cand& x, const Cand& y) {
        if (std::abs(x.pm.norm() - y.pm.norm()) > 1e-9) return x.pm.norm() < y.pm.norm();
        return x.ph.norm() < y.ph.norm();
      });
      // ambiguous when the minimal-norm rule does not single out the m-part
      for (size_t k = 1; k < good.size(); ++k)
        if (std::abs(good[k].pm.norm() - good[0].pm.norm()) < 1e-9 && (good[k].pm - good[0].pm).norm() > 1e-8)
          out.log_branch_ambiguous = true;
      out.alpha_log = good[0].ph;
      b = -0.5 * I * good[0].pm;  // m-part is 2 i b
    }
    bool wall = false;
    out.alpha_spectrum = canonical_alcove_spectrum(matrix_exp(2.0 * kPi * I * out.alpha_log), traceless, &wall);
    out.log_branch_ambiguous = out.log_branch_ambiguous || wall;
    out.nilpotent_log = nilpotent_log(jf.g_u) / (2 * kPi);
  }
  if (out.log_branch_ambiguous) out.note += "log branch ambiguous, canonical alcove choice applied; ";

  CMat a = CMat::Zero(N, N);
  if (beta) {
    a = 0.5 * (*beta);
  } else {
    out.note += "no weight supplied, real part of s taken as 0; ";
  }
  out.s = a + b;
  out.s_spectrum = sorted_eigenvalues(out.s);

  // real nilpotent (i/2) N carries the G-orbit; its KS image is the orbit of Y
  CMat fr = 0.5 * I * out.nilpotent_log;
  if (fr.norm() < 1e-6) fr.setZero();  // Jordan splitting noise on a semisimple M
  if (fr.norm() > 0 && !r.complex_group && !r.in_real_form(fr, 1e-7))
    throw Error("NumericallyDefective", "unipotent factor is not generated by an element of g");
  if (!r.complex_group) fr = 0.5 * (fr + r.sigma(fr));
  out.y_certificate = kostant_sekiguchi_orbit_map(r, fr).certificate;
  return out;
}

std::string lift_name(SL2Lift l) { return l == SL2Lift::Cusp ? "cusp" : "minus_unipotent"; }

ParabolicHiggsData hitchin_section(const HitchinSectionInput& in) {
  const int n = in.n;
  if (n < 2) throw Error("BadRank", "n must be at least 2");
  const int euler = 2 * in.genus - 2 + in.punctures;
  if (in.genus < 0 || in.punctures < 0 || euler <= 0) throw Error("BadTopology", "needs 2g - 2 + n > 0");
  if (in.lift == SL2Lift::MinusUnipotent && n != 2)
    throw Error("UnsupportedLift", "the minus-unipotent lift is only defined for SL(2,R)");

  ParabolicHiggsData d;
  d.genus = in.genus;
  d.group.group = Group::SLR;
  d.group.n = n;
  d.group.model = Model::SplitDiagonal;

  CMat X = CMat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) X(i, i + 1) = std::sqrt(double((i + 1) * (n - 1 - i)));
  const CMat Xt = X.transpose();
  std::vector<CMat> ej(n);  // ej[j] = (X^T)^j
  ej[0] = CMat::Identity(n, n);
  for (int j = 1; j < n; ++j) ej[j] = ej[j - 1] * Xt;

  const bool cusp = in.lift == SL2Lift::Cusp;
  // summand k is (K(D))^{k - (n-1)/2} (cusp), or K^{k - 1/2} with weights (1/2, -1/2)
  for (int k = 0; k < n; ++k) {
    Q power = Q(2 * k - (n - 1), 2);
    d.degrees.push_back(cusp ? power * euler : power * (2 * in.genus - 2));
  }
  for (int p = 0; p < in.punctures; ++p) {
    PunctureData pd;
    if (cusp) {
      pd.weight = QVec(n, Q(0));
      pd.laurent.push_back({0, X});
    } else {
      pd.weight = {Q(1, 2), Q(-1, 2)};
      pd.laurent.push_back({1, X});
    }
    d.punctures.push_back(pd);
  }
  d.support.assign(n, std::vector<bool>(n, false));
  for (int i = 0; i + 1 < n; ++i) d.support[i][i + 1] = true;
  for (const auto& q : in.q) {
    if (q.j < 1 || q.j >= n) throw Error("BadDifferential", "differential index out of range");
    if (q.puncture < 0 || q.puncture >= in.punctures) throw Error("BadDifferential", "marked point index out of range");
    if (q.order < -q.j) throw Error("PoleOrderViolation", "q_" + std::to_string(q.j + 1) + " has a pole of order " +
                                                              std::to_string(-q.order) + " > " + std::to_string(q.j));
    if (q.coeff == cd(0)) continue;
    // frame change from (dz)^{j+1} to the dz/z frame of the Higgs field
    int order = cusp ? q.order + q.j + 1 : q.order + 1;
    d.punctures[q.puncture].laurent.push_back({order, q.coeff * ej[q.j]});
    for (int k = 0; k + q.j < n; ++k) d.support[k + q.j][k] = true;
  }
  return d;
}

namespace {

void hermitian_type_split(const ParabolicHiggsData& d, int& p, int& q) {
  const auto& g = d.group;
  if (g.group == Group::SUpq) {
    p = g.p, q = g.q;
  } else if (g.group == Group::SLR && g.model == Model::SplitDiagonal && g.n == 2) {
    p = q = 1;
  } else {
    throw Error("NotHermitianType", "Toledo invariant needs SU(p,q) or the split SL(2,R) model");
  }
  if (p + q != d.rank()) throw Error("DimensionMismatch", "p + q differs from the rank");
}

Q summand_pardeg(const ParabolicHiggsData& d, int k) {
  Q v = d.degrees[k];
  for (const auto& pt : d.punctures) v -= pt.weight[k];
  return v;
}

// generic rank of a 0/1 block: maximum bipartite matching
int generic_rank(const std::vector<std::vector<bool>>& sup, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<int> match(cols.size(), -1);
  std::function<bool(size_t, std::vector<bool>&)> augment = [&](size_t i, std::vector<bool>& seen) {
    for (size_t j = 0; j < cols.size(); ++j) {
      if (!sup[rows[i]][cols[j]] || seen[j]) continue;
      seen[j] = true;
      if (match[j] < 0 || augment(match[j], seen)) {
        match[j] = static_cast<int>(i);
        return true;
      }
    }
    return false;
  };
  int rank = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    std::vector<bool> seen(cols.size(), false);
    if (augment(i, seen)) ++rank;
  }
  return rank;
}

}  // namespace

Q toledo_invariant(const ParabolicHiggsData& d) {
  int p = 0, q = 0;
  hermitian_type_split(d, p, q);
  Q pv = 0, pw = 0;
  for (int k = 0; k < p; ++k) pv += summand_pardeg(d, k);
  for (int k = p; k < p + q; ++k) pw += summand_pardeg(d, k);
  return Q(2) * (Q(q) * pv - Q(p) * pw) / Q(p + q);
}

MilnorWoodReport milnor_wood_check(const ParabolicHiggsData& d) {
  int p = 0, q = 0;
  hermitian_type_split(d, p, q);
  MilnorWoodReport m;
  m.tau = toledo_invariant(d);
  m.euler = Q(2 * d.genus - 2 + static_cast<int>(d.punctures.size()));
  auto sup = effective_support(d);
  std::vector<int> V(p), W(q);
  for (int k = 0; k < p; ++k) V[k] = k;
  for (int k = 0; k < q; ++k) W[k] = p + k;
  m.rank_plus = generic_rank(sup, V, W);   // W -> V block
  m.rank_minus = generic_rank(sup, W, V);  // V -> W block
  m.lower_margin = m.tau + Q(m.rank_plus) * m.euler;
  m.upper_margin = Q(m.rank_minus) * m.euler - m.tau;
  if (m.lower_margin < 0) {
    m.ok = false;
    m.violated = "lower";
  } else if (m.upper_margin < 0) {
    m.ok = false;
    m.violated = "upper";
  }
  return m;
}

}  // namespace phb
