#include "phb/modelmetric.hpp"

#include <cmath>
#include <numbers>

namespace phb {

namespace {

constexpr double kPi = std::numbers::pi;
const cd I(0.0, 1.0);

CMat rotate(const CMat& alpha, double theta, const CMat& m) {
  CMat u = matrix_exp(I * theta * alpha);
  return u * m * u.adjoint();
}

void check_radius(double r) {
  if (!(r > 0.0 && r < 1.0)) throw Error("OutsideDisc", "the model lives on 0 < |z| < 1");
}

CMat connection_theta(const LocalModel& m, double r, double theta) {
  const double l = std::log(r * r);
  return -I * (m.alpha - rotate(m.alpha, theta, m.triple.x) / l);
}

}  // namespace

LocalModel local_model(const PunctureDictionaryEntry& d) {
  LocalModel m;
  m.alpha = d.alpha_matrix;
  m.s = d.s;
  m.triple = d.triple;
  m.psi = CMat::Zero(d.s.rows(), d.s.cols());
  return m;
}

void validate_model(const LocalModel& m, double tol) {
  const int n = static_cast<int>(m.alpha.rows());
  auto fix = [&](const CMat& a) { return a.size() ? a : CMat(CMat::Zero(n, n)); };
  const CMat s = fix(m.s), H = fix(m.triple.x), X = fix(m.triple.e), Y = fix(m.triple.f);
  if (!is_hermitian(m.alpha, tol)) throw Error("BadModel", "alpha must be Hermitian");
  const CMat E = matrix_exp(2.0 * kPi * I * m.alpha);
  const double scale = std::max(1.0, H.norm() + Y.norm());
  for (const CMat* a : {&H, &X, &Y})
    if ((E * (*a) * E.inverse() - *a).norm() > tol * scale)
      throw Error("NotSingleValued", "H, X, Y must be fixed by Ad(exp(2 pi i alpha))");
  if (bracket(m.alpha, s).norm() > tol * std::max(1.0, s.norm()))
    throw Error("BadModel", "the model needs [alpha, s] = 0");
  if (Y.norm() > tol) {
    SL2Triple t{H, X, Y, Flavor::Plain};
    if (bracket_defect(t) > tol * scale * scale || (X - Y.adjoint()).norm() > tol * scale)
      throw Error("BadModel", "(H, X, Y) must be a triple with X = Y^*");
  }
}

CMat model_metric_eval(const CMat& alpha, const CMat& H, cd z) {
  const double r = std::abs(z), theta = std::arg(z);
  check_radius(r);
  const CMat E = matrix_exp(2.0 * kPi * I * alpha);
  if ((E * H * E.inverse() - H).norm() > 1e-9 * std::max(1.0, H.norm()))
    throw Error("NotSingleValued", "H must be fixed by Ad(exp(2 pi i alpha))");
  const double L = -std::log(r * r);
  CMat a = matrix_exp(-std::log(r) * alpha);
  CMat h = a * matrix_exp(std::log(L) * rotate(alpha, theta, H)) * a;
  return 0.5 * (h + h.adjoint());
}

CMat unitary_gauge(const CMat& alpha, const CMat& H, cd z) {
  const double r = std::abs(z), theta = std::arg(z);
  check_radius(r);
  const double L = -std::log(r * r);
  return matrix_exp(std::log(r) * alpha) * matrix_exp(-0.5 * std::log(L) * rotate(alpha, theta, H));
}

RadialGrid make_radial_grid(double r_max, double ratio, int n, int n_theta) {
  RadialGrid g;
  g.n_theta = n_theta;
  double r = r_max;
  for (int k = 0; k < n; ++k, r *= ratio) g.radii.push_back(r);
  validate_grid(g);
  return g;
}

void validate_grid(const RadialGrid& g) {
  if (g.n_theta < 64) throw Error("BadGrid", "at least 64 angular samples");
  if (g.radii.empty()) throw Error("BadGrid", "no radii");
  for (size_t k = 0; k < g.radii.size(); ++k) {
    check_radius(g.radii[k]);
    if (k > 0 && !(g.radii[k] < g.radii[k - 1])) throw Error("BadGrid", "radii must be strictly decreasing");
  }
}

CMat curvature_analytic(const LocalModel& m, double r, double theta) {
  check_radius(r);
  const double l = std::log(r * r);
  return rotate(m.alpha, theta, m.triple.x) / (l * l);
}

CMat curvature_fd(const LocalModel& m, double r, double theta, double rel_step) {
  const double d = rel_step * r;
  check_radius(r + d);
  check_radius(r - d);
  // F = d_r A_theta dr ^ dtheta, and dr ^ dtheta = (i / 2r) dz ^ dzbar
  CMat dA = (connection_theta(m, r + d, theta) - connection_theta(m, r - d, theta)) / (2.0 * d);
  return (I * r / 2.0) * dA;
}

CMat unitary_higgs(const LocalModel& m, double r, double theta) {
  check_radius(r);
  const cd z = std::polar(r, theta);
  const CMat g0 = unitary_gauge(m.alpha, m.triple.x, z);
  const CMat za = matrix_exp(std::log(z) * m.alpha);
  CMat res = m.s + za * m.triple.f * za.inverse();
  if (m.psi.size() && m.psi.norm() > 0) res += std::pow(z, m.psi_order) * m.psi;
  return g0.inverse() * res * g0;
}

CMat higgs_term(const LocalModel& m, double r, double theta) {
  // tau(Phi dz/z) = -Phi^* dzbar/zbar in the unitary frame
  CMat p = unitary_higgs(m, r, theta);
  return -bracket(p, p.adjoint());
}

ResidualProfile hitchin_residual(const LocalModel& m, const RadialGrid& g, const ResidualOptions& opt) {
  validate_grid(g);
  validate_model(m);
  ResidualProfile out;
  out.radii = g.radii;
  for (double r : g.radii) {
    const double l = std::log(r * r);
    double ra = 0, rf = 0;
    for (int k = 0; k < g.n_theta; ++k) {
      const double theta = 2.0 * kPi * k / g.n_theta;
      CMat h = higgs_term(m, r, theta);
      ra = std::max(ra, l * l * (curvature_analytic(m, r, theta) - h).norm());
      rf = std::max(rf, l * l * (curvature_fd(m, r, theta, opt.fd_step) - h).norm());
    }
    out.rho_analytic.push_back(ra);
    out.rho_fd.push_back(rf);
    out.max_gap = std::max(out.max_gap, std::abs(ra - rf));
  }
  if (out.max_gap > opt.fd_tolerance)
    throw Error("GridTooCoarse", "finite-difference and analytic curvature disagree", ErrorClass::Convergence);
  return out;
}

HolonomyResult holonomy_check(const LocalModel& m, double r, const HolonomyOptions& opt) {
  check_radius(r);
  validate_model(m);
  const int n = static_cast<int>(m.alpha.rows());
  const CMat Id = CMat::Identity(n, n);
  const CMat N = m.triple.f - m.triple.x - m.triple.e;
  const CMat A0 = I * (-m.alpha + m.s - m.s.adjoint());
  const double l = std::log(r * r);
  // d Psi / d theta = -A(theta) Psi with the d theta coefficient of the flat connection
  auto A = [&](double theta) { return CMat(A0 - I * rotate(m.alpha, theta, N) / l); };
  auto rk4 = [&](int steps) {
    const double h = 2.0 * kPi / steps;
    CMat P = Id;
    for (int k = 0; k < steps; ++k) {
      const double t = k * h;
      const CMat Am = A(t + h / 2);
      CMat k1 = -A(t) * P;
      CMat k2 = -Am * (P + (h / 2) * k1);
      CMat k3 = -Am * (P + (h / 2) * k2);
      CMat k4 = -A(t + h) * (P + h * k3);
      P += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return P;
  };

  HolonomyResult out;
  out.r = r;
  int steps = 64;
  CMat coarse = rk4(steps);
  for (;;) {
    if (2 * steps > opt.max_steps)
      throw Error("IntegratorFailure", "holonomy did not reach the requested tolerance", ErrorClass::Convergence);
    CMat fine = rk4(2 * steps);
    const double est = (fine - coarse).norm() / 15.0;
    steps *= 2;
    if (est < opt.tolerance) {
      out.numeric = fine + (fine - coarse) / 15.0;
      out.error_estimate = est;
      break;
    }
    coarse = fine;
  }
  out.steps = steps;

  const cd c = convention_scale(opt.convention);
  const CMat E = matrix_exp(2.0 * kPi * I * m.alpha);
  const CMat F = matrix_exp(c * (m.s.adjoint() - m.s));
  out.limit = E * F;
  out.predicted = out.limit * matrix_exp(c * N);
  out.deviation = (out.numeric - out.limit).norm();
  out.literal_deviation = (out.numeric - out.predicted).norm();
  return out;
}

DecayFit fit_inverse_log(const std::vector<double>& radii, const std::vector<double>& values) {
  if (radii.size() != values.size() || radii.size() < 2) throw Error("BadFit", "need at least two samples");
  double sxy = 0, sxx = 0, mean = 0;
  for (size_t k = 0; k < radii.size(); ++k) {
    const double x = 1.0 / std::abs(std::log(radii[k]));
    sxy += x * values[k], sxx += x * x, mean += values[k];
  }
  mean /= static_cast<double>(values.size());
  DecayFit f;
  f.C = sxy / sxx;
  double ss_res = 0, ss_tot = 0;
  for (size_t k = 0; k < radii.size(); ++k) {
    const double x = 1.0 / std::abs(std::log(radii[k]));
    ss_res += std::pow(values[k] - f.C * x, 2);
    ss_tot += std::pow(values[k] - mean, 2);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
  return f;
}

}  // namespace phb
