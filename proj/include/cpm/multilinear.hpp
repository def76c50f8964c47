#pragma once

#include <functional>

#include "cpm/core.hpp"

namespace cpm {

//
// Symmetric multilinear form A[h_1, ..., h_{p+1}]. Orders 2 and 3 are
// stored densely (matrix / flat tensor); higher orders are presented
// through an evaluator callback.
//
class SymmetricForm {
 public:
  using Evaluator = std::function<double(const std::vector<Vector>&)>;

  // Order 2 from a symmetric matrix.
  static SymmetricForm from_matrix(Matrix A);
  // Order 3 from a flat tensor T[i*n*n + j*n + k]; symmetrized on input.
  static SymmetricForm from_tensor3(int n, std::vector<double> T);
  // General order with a user evaluator (assumed symmetric).
  SymmetricForm(int order, int dimension, Evaluator eval);

  int order() const { return order_; }
  int dimension() const { return dim_; }

  double operator()(const std::vector<Vector>& args) const;
  // A[u]^i [v]^j with i + j = order.
  double eval_uv(const Vector& u, int i, const Vector& v, int j) const;
  // Diagonal A[h]^order.
  double diag(const Vector& h) const;

  const Matrix* matrix() const { return has_matrix_ ? &A_ : nullptr; }

 private:
  SymmetricForm() = default;
  int order_ = 0;
  int dim_ = 0;
  Evaluator eval_;
  bool has_matrix_ = false;
  Matrix A_;
};

// C_p = ((p+1)^{p+1} + p^{p+1} + 1)/(p+1)!  (exact rational, returned as double).
double c_p(int p);

// Certificate for |A[u]^p[v]| <= C_p * max over {u, v, h_1..h_p} of
// |A[h]^{p+1}|, with h_i = (i/(i+1)) u + (1/(i+1)) v.
struct VariationCertificate {
  double lhs = 0.0;
  std::vector<Vector> rhs_points;
  double bound = 0.0;
  bool holds(double rel_tol = 1e-8) const { return lhs <= bound + rel_tol * (1.0 + bound); }
};
VariationCertificate variation_certificate(const SymmetricForm& A, const Vector& u,
                                           const Vector& v);

// For PSD bilinear forms the off-diagonal and diagonal suprema coincide
// over any finite point set; returns (max pair |A[u,v]|, max diag A[h,h]).
struct PsdEqualityResult {
  double lhs = 0.0;
  double rhs = 0.0;
};
PsdEqualityResult psd_equality_check(const SymmetricForm& A, const std::vector<Vector>& S);

}  // namespace cpm
