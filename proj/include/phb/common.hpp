#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace phb {

using Q = boost::multiprecision::cpp_rational;
using QVec = std::vector<Q>;
using QMat = std::vector<QVec>;  // row-major

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Exit-code classes used by the CLI: precondition -> 3, convergence/bound -> 4.
enum class ErrorClass { Precondition, Convergence };

class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what,
        ErrorClass cls = ErrorClass::Precondition)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)), cls_(cls) {}
  const std::string& kind() const { return kind_; }
  ErrorClass error_class() const { return cls_; }

 private:
  std::string kind_;
  ErrorClass cls_;
};

// "p/q" or "p" or a decimal like "0.25"
Q parse_rational(const std::string& s);
std::string format_rational(const Q& q);
double to_double(const Q& q);
Q floor_q(const Q& q);
bool is_integer(const Q& q);

// exact rational linear algebra
int rank_q(QMat m);
// Solves A x = b for square nonsingular A; throws if singular.
QVec solve_q(QMat a, QVec b);
QMat inverse_q(const QMat& a);

CMat bracket(const CMat& a, const CMat& b);
CMat kron_ad(const CMat& a);  // matrix of ad(a) on column-major vec
CVec vec(const CMat& a);
CMat unvec(const CVec& v, int n);

// Numerical rank and orthonormal bases over C.
int numeric_rank(const CMat& cols, double tol = 1e-9);
// Orthonormal basis of the column span; tolerance relative to largest singular value.
CMat column_span(const CMat& cols, double tol = 1e-9);
CMat null_space(const CMat& m, double tol = 1e-9);

// Orthonormal basis of a list of matrices as complex vectors, returned as matrices.
std::vector<CMat> span_basis(const std::vector<CMat>& mats, double tol = 1e-9);

bool is_hermitian(const CMat& a, double tol = 1e-10);

}  // namespace phb
