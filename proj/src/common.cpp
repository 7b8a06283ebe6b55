#include "phb/common.hpp"

#include <sstream>

namespace phb {

using boost::multiprecision::cpp_int;

Q parse_rational(const std::string& raw) {
  std::string s;
  for (char c : raw)
    if (!isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw Error("ParseError", "empty rational");
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      cpp_int p(s.substr(0, slash)), q(s.substr(slash + 1));
      if (q == 0) throw Error("ParseError", "zero denominator in '" + raw + "'");
      return Q(p, q);
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
      std::string intpart = s.substr(0, dot), frac = s.substr(dot + 1);
      bool neg = !intpart.empty() && intpart[0] == '-';
      if (neg || (!intpart.empty() && intpart[0] == '+')) intpart = intpart.substr(1);
      if (intpart.empty()) intpart = "0";
      cpp_int den = 1;
      for (size_t i = 0; i < frac.size(); ++i) den *= 10;
      cpp_int num = cpp_int(intpart) * den + (frac.empty() ? cpp_int(0) : cpp_int(frac));
      Q r(num, den);
      return neg ? Q(-r) : r;
    }
    return Q(cpp_int(s));
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error("ParseError", "not a rational: '" + raw + "'");
  }
}

std::string format_rational(const Q& q) {
  std::ostringstream os;
  os << numerator(q);
  if (denominator(q) != 1) os << "/" << denominator(q);
  return os.str();
}

double to_double(const Q& q) { return q.convert_to<double>(); }

Q floor_q(const Q& q) {
  cpp_int n = numerator(q), d = denominator(q);
  cpp_int f = n / d;  // truncates toward zero
  if (n < 0 && f * d != n) f -= 1;
  return Q(f);
}

bool is_integer(const Q& q) { return denominator(q) == 1; }

int rank_q(QMat m) {
  if (m.empty()) return 0;
  size_t rows = m.size(), cols = m[0].size();
  size_t r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t piv = r;
    while (piv < rows && m[piv][c] == 0) ++piv;
    if (piv == rows) continue;
    std::swap(m[piv], m[r]);
    for (size_t i = r + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      Q f = m[i][c] / m[r][c];
      for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    ++r;
  }
  return static_cast<int>(r);
}

QVec solve_q(QMat a, QVec b) {
  size_t n = a.size();
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw Error("SingularSystem", "rational system is singular");
    std::swap(a[piv], a[c]);
    std::swap(b[piv], b[c]);
    for (size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      Q f = a[i][c] / a[c][c];
      for (size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
      b[i] -= f * b[c];
    }
  }
  QVec x(n);
  for (size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

QMat inverse_q(const QMat& a) {
  size_t n = a.size();
  QMat inv(n, QVec(n));
  for (size_t j = 0; j < n; ++j) {
    QVec e(n, Q(0));
    e[j] = 1;
    QVec col = solve_q(a, e);
    for (size_t i = 0; i < n; ++i) inv[i][j] = col[i];
  }
  return inv;
}

CMat bracket(const CMat& a, const CMat& b) { return a * b - b * a; }

CMat kron_ad(const CMat& a) {
  // vec(AX - XA) = (I kron A - A^T kron I) vec(X), column-major vec
  const int n = static_cast<int>(a.rows());
  CMat m = CMat::Zero(n * n, n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      CMat e = CMat::Zero(n, n);
      e(i, j) = 1.0;
      m.col(j * n + i) = vec(bracket(a, e));
    }
  return m;
}

CVec vec(const CMat& a) {
  return Eigen::Map<const CVec>(a.data(), a.size());
}

CMat unvec(const CVec& v, int n) {
  return Eigen::Map<const CMat>(v.data(), n, n);
}

int numeric_rank(const CMat& cols, double tol) {
  if (cols.size() == 0) return 0;
  Eigen::JacobiSVD<CMat> svd(cols);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, sv(0))) ++r;
  return r;
}

CMat column_span(const CMat& cols, double tol) {
  if (cols.cols() == 0) return CMat(cols.rows(), 0);
  Eigen::JacobiSVD<CMat> svd(cols, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, sv(0))) ++r;
  return svd.matrixU().leftCols(r);
}

CMat null_space(const CMat& m, double tol) {
  const int n = static_cast<int>(m.cols());
  if (m.rows() == 0) return CMat::Identity(n, n);
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = sv.size() ? sv(0) : 0.0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * std::max(1.0, top)) ++r;
  return svd.matrixV().rightCols(n - r);
}

std::vector<CMat> span_basis(const std::vector<CMat>& mats, double tol) {
  std::vector<CMat> out;
  if (mats.empty()) return out;
  const int n = static_cast<int>(mats[0].rows());
  CMat cols(n * n, mats.size());
  for (size_t k = 0; k < mats.size(); ++k) cols.col(k) = vec(mats[k]);
  CMat u = column_span(cols, tol);
  for (int k = 0; k < u.cols(); ++k) out.push_back(unvec(u.col(k), n));
  return out;
}

bool is_hermitian(const CMat& a, double tol) {
  return (a - a.adjoint()).norm() <= tol * std::max(1.0, a.norm());
}

}  // namespace phb
