#include "cpm/oracles.hpp"

namespace cpm {

QuadraticOracle::QuadraticOracle(Matrix A, Vector b)
    : SmoothOracle(static_cast<int>(A.rows())), A_(std::move(A)), b_(std::move(b)) {
  if (A_.rows() != A_.cols()) throw std::invalid_argument("quadratic matrix must be square");
  if (!A_.isApprox(A_.transpose(), 1e-12))
    throw std::invalid_argument("quadratic matrix must be symmetric");
  if (b_.size() == 0) b_ = Vector::Zero(A_.rows());
  if (b_.size() != A_.rows()) throw DimensionMismatch("linear term dimension mismatch");
}

double QuadraticOracle::value_impl(const Vector& x) const {
  return 0.5 * x.dot(A_ * x) + b_.dot(x);
}

Vector QuadraticOracle::gradient_impl(const Vector& x) const { return A_ * x + b_; }

LinearOracle::LinearOracle(Vector c, double d)
    : SmoothOracle(static_cast<int>(c.size())), c_(std::move(c)), d_(d) {}

AffinePullbackOracle::AffinePullbackOracle(std::shared_ptr<const SmoothOracle> inner, Matrix M,
                                           Vector q)
    : SmoothOracle(static_cast<int>(M.cols())),
      inner_(std::move(inner)),
      M_(std::move(M)),
      q_(std::move(q)) {
  if (!inner_) throw std::invalid_argument("null inner oracle");
  if (M_.rows() != inner_->dimension() || q_.size() != inner_->dimension())
    throw DimensionMismatch("affine map dimension mismatch");
}

std::shared_ptr<PolytopeDomain> pullback_simplex_domain(const Matrix& M, const Vector& q) {
  const int n = static_cast<int>(M.rows());
  Eigen::PartialPivLU<Matrix> lu(M);
  std::vector<Vector> atoms;
  atoms.reserve(n);
  for (int i = 0; i < n; ++i) {
    Vector e = Vector::Zero(n);
    e[i] = 1.0;
    atoms.push_back(lu.solve(e - q));
  }
  return std::make_shared<PolytopeDomain>(std::move(atoms));
}

}  // namespace cpm
