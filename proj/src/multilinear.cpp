#include "cpm/multilinear.hpp"

#include <algorithm>

namespace cpm {

SymmetricForm SymmetricForm::from_matrix(Matrix A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("form matrix must be square");
  if (!A.isApprox(A.transpose(), 1e-12))
    throw std::invalid_argument("form matrix must be symmetric");
  SymmetricForm f;
  f.order_ = 2;
  f.dim_ = static_cast<int>(A.rows());
  f.has_matrix_ = true;
  f.A_ = std::move(A);
  return f;
}

SymmetricForm SymmetricForm::from_tensor3(int n, std::vector<double> T) {
  if (static_cast<int>(T.size()) != n * n * n)
    throw std::invalid_argument("tensor size mismatch");
  // symmetrize over the 6 index permutations
  std::vector<double> S(T.size(), 0.0);
  auto at = [n](const std::vector<double>& t, int i, int j, int k) -> double {
    return t[(i * n + j) * n + k];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        S[(i * n + j) * n + k] = (at(T, i, j, k) + at(T, i, k, j) + at(T, j, i, k) +
                                  at(T, j, k, i) + at(T, k, i, j) + at(T, k, j, i)) /
                                 6.0;
  SymmetricForm f;
  f.order_ = 3;
  f.dim_ = n;
  auto data = std::make_shared<std::vector<double>>(std::move(S));
  f.eval_ = [n, data](const std::vector<Vector>& args) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double uij = args[0][i] * args[1][j];
        if (uij == 0.0) continue;
        for (int k = 0; k < n; ++k) acc += (*data)[(i * n + j) * n + k] * uij * args[2][k];
      }
    return acc;
  };
  return f;
}

SymmetricForm::SymmetricForm(int order, int dimension, Evaluator eval) {
  if (order < 2) throw std::invalid_argument("form order must be >= 2");
  order_ = order;
  dim_ = dimension;
  eval_ = std::move(eval);
}

double SymmetricForm::operator()(const std::vector<Vector>& args) const {
  if (static_cast<int>(args.size()) != order_)
    throw std::invalid_argument("argument count must equal the form order");
  for (const auto& a : args)
    if (a.size() != dim_) throw DimensionMismatch("form argument dimension mismatch");
  if (has_matrix_) return args[0].dot(A_ * args[1]);
  return eval_(args);
}

double SymmetricForm::eval_uv(const Vector& u, int i, const Vector& v, int j) const {
  if (i + j != order_) throw std::invalid_argument("multiplicities must sum to the order");
  std::vector<Vector> args;
  args.reserve(order_);
  for (int t = 0; t < i; ++t) args.push_back(u);
  for (int t = 0; t < j; ++t) args.push_back(v);
  return (*this)(args);
}

double SymmetricForm::diag(const Vector& h) const { return eval_uv(h, order_, h, 0); }

double c_p(int p) {
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  long double num = std::pow(static_cast<long double>(p + 1), p + 1) +
                    std::pow(static_cast<long double>(p), p + 1) + 1.0L;
  long double fact = 1.0L;
  for (int i = 2; i <= p + 1; ++i) fact *= i;
  return static_cast<double>(num / fact);
}

VariationCertificate variation_certificate(const SymmetricForm& A, const Vector& u,
                                           const Vector& v) {
  const int p = A.order() - 1;
  VariationCertificate cert;
  cert.lhs = std::abs(A.eval_uv(u, p, v, 1));
  cert.rhs_points.push_back(u);
  cert.rhs_points.push_back(v);
  for (int i = 1; i <= p; ++i) {
    const double alpha = static_cast<double>(i) / (i + 1);
    cert.rhs_points.push_back(alpha * u + (1.0 - alpha) * v);
  }
  double diag_max = 0.0;
  for (const auto& h : cert.rhs_points) diag_max = std::max(diag_max, std::abs(A.diag(h)));
  cert.bound = c_p(p) * diag_max;
  return cert;
}

PsdEqualityResult psd_equality_check(const SymmetricForm& A, const std::vector<Vector>& S) {
  if (A.order() != 2 || A.matrix() == nullptr)
    throw std::invalid_argument("psd_equality_check needs an explicit bilinear form");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(*A.matrix());
  if (eig.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("form is not positive semidefinite");
  PsdEqualityResult out;
  for (const auto& u : S) {
    out.rhs = std::max(out.rhs, A.diag(u));
    for (const auto& v : S) out.lhs = std::max(out.lhs, std::abs(A.eval_uv(u, 1, v, 1)));
  }
  return out;
}

}  // namespace cpm
