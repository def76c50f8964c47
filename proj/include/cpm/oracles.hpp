#pragma once

#include "cpm/core.hpp"

namespace cpm {

// f(x) = 0.5 <Ax, x> + <b, x> with A symmetric.
class QuadraticOracle final : public SmoothOracle {
 public:
  explicit QuadraticOracle(Matrix A, Vector b = Vector());
  const Matrix& matrix() const { return A_; }

  bool has_third_directional() const override { return true; }
  double third_directional(const Vector&, const Vector&) const override { return 0.0; }

 protected:
  double value_impl(const Vector& x) const override;
  Vector gradient_impl(const Vector& x) const override;
  Matrix hessian_impl(const Vector&) const override { return A_; }
  Vector hessian_vec_impl(const Vector&, const Vector& h) const override { return A_ * h; }

 private:
  Matrix A_;
  Vector b_;
};

// f(x) = <c, x> + d.
class LinearOracle final : public SmoothOracle {
 public:
  explicit LinearOracle(Vector c, double d = 0.0);

  bool has_third_directional() const override { return true; }
  double third_directional(const Vector&, const Vector&) const override { return 0.0; }

 protected:
  double value_impl(const Vector& x) const override { return c_.dot(x) + d_; }
  Vector gradient_impl(const Vector&) const override { return c_; }
  Matrix hessian_impl(const Vector&) const override {
    return Matrix::Zero(dimension(), dimension());
  }
  Vector hessian_vec_impl(const Vector&, const Vector&) const override {
    return Vector::Zero(dimension());
  }

 private:
  Vector c_;
  double d_;
};

// Pullback f~(x) = f(Mx + q) under an invertible affine change of
// variables. Gradients and Hessians transform with M^T; used to state
// affine-invariance checks.
class AffinePullbackOracle final : public SmoothOracle {
 public:
  AffinePullbackOracle(std::shared_ptr<const SmoothOracle> inner, Matrix M, Vector q);

  bool has_third_directional() const override { return inner_->has_third_directional(); }
  double third_directional(const Vector& x, const Vector& h) const override {
    return inner_->third_directional(map(x), M_ * h);
  }

 protected:
  double value_impl(const Vector& x) const override { return inner_->value(map(x)); }
  Vector gradient_impl(const Vector& x) const override {
    return M_.transpose() * inner_->gradient(map(x));
  }
  Matrix hessian_impl(const Vector& x) const override {
    return M_.transpose() * inner_->hessian(map(x)) * M_;
  }
  Vector hessian_vec_impl(const Vector& x, const Vector& h) const override {
    return M_.transpose() * inner_->hessian_vec(map(x), M_ * h);
  }

 private:
  Vector map(const Vector& x) const { return M_ * x + q_; }
  std::shared_ptr<const SmoothOracle> inner_;
  Matrix M_;
  Vector q_;
};

// Domain whose atoms are the preimages M^{-1}(e_i - q) of the simplex
// vertices; pairs with AffinePullbackOracle for invariance tests.
std::shared_ptr<PolytopeDomain> pullback_simplex_domain(const Matrix& M, const Vector& q);

}  // namespace cpm
