#pragma once

#include <vector>

#include "phb/nahodge.hpp"

namespace phb {

// Local model at one marked point, in the disc |z| < 1.
struct LocalModel {
  CMat alpha;         // Hermitian element of i*t
  CMat s;             // normal, commuting with alpha
  SL2Triple triple;   // x = H, e = X, f = Y with X = Y^*
  CMat psi;           // optional holomorphic correction z^psi_order * psi to the residue
  int psi_order = 1;
};

LocalModel local_model(const PunctureDictionaryEntry& d);

// Throws NotSingleValued unless H, X, Y are fixed by Ad(exp(2 pi i alpha)),
// and BadModel when alpha is not Hermitian, [alpha, s] != 0 or the triple is off.
void validate_model(const LocalModel& m, double tol = 1e-9);

// |z|^{-alpha} (-ln|z|^2)^{Ad(e^{i theta alpha}) H} |z|^{-alpha}
CMat model_metric_eval(const CMat& alpha, const CMat& H, cd z);

// g0 = |z|^alpha (-ln|z|^2)^{-Ad(e^{i theta alpha}) H / 2}; the unitary frame is e g0.
CMat unitary_gauge(const CMat& alpha, const CMat& H, cd z);

struct RadialGrid {
  std::vector<double> radii;  // strictly decreasing in (0, 1)
  int n_theta = 64;
};

// n radii r_max * ratio^k, k = 0..n-1.
RadialGrid make_radial_grid(double r_max, double ratio, int n, int n_theta = 64);
void validate_grid(const RadialGrid& g);

// Coefficients of dz ^ dzbar / |z|^2 at z = r e^{i theta}.
CMat curvature_analytic(const LocalModel& m, double r, double theta);
CMat curvature_fd(const LocalModel& m, double r, double theta, double rel_step);
CMat higgs_term(const LocalModel& m, double r, double theta);  // [phi, tau(phi)]
CMat unitary_higgs(const LocalModel& m, double r, double theta);  // phi = Phi dz/z

struct ResidualProfile {
  std::vector<double> radii;
  std::vector<double> rho_analytic, rho_fd;
  double max_gap = 0;  // max |rho_analytic - rho_fd|
};

struct ResidualOptions {
  double fd_step = 1e-3;        // relative radial step
  double fd_tolerance = 1e-5;   // GridTooCoarse above this gap
};

// rho(r) = sup_theta (ln r^2)^2 |R(h0) - [phi, tau(phi)]| in the unitary frame.
ResidualProfile hitchin_residual(const LocalModel& m, const RadialGrid& g, const ResidualOptions& opt = {});

struct HolonomyOptions {
  MonodromyConvention convention = MonodromyConvention::RealScale;
  double tolerance = 1e-10;
  int max_steps = 1 << 16;
};

struct HolonomyResult {
  double r = 0;
  CMat numeric;        // transport of the d theta part around |z| = r, unitary frame
  CMat predicted;      // monodromy formula, all three factors
  CMat limit;          // elliptic times hyperbolic factor, the r -> 0 limit in this frame
  double deviation = 0;          // |numeric - limit|
  double literal_deviation = 0;  // |numeric - predicted|
  double error_estimate = 0;
  int steps = 0;
};

HolonomyResult holonomy_check(const LocalModel& m, double r, const HolonomyOptions& opt = {});

// Least squares y = C / |ln r| through the origin.
struct DecayFit {
  double C = 0, r2 = 0;
};
DecayFit fit_inverse_log(const std::vector<double>& radii, const std::vector<double>& values);

}  // namespace phb
