#include "cpm/core.hpp"

namespace cpm {

bool all_finite(const Vector& x) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i])) return false;
  return true;
}

Vector SimplexDomain::atom(int j) const {
  if (j < 0 || j >= dimension()) throw std::out_of_range("atom index");
  Vector e = Vector::Zero(dimension());
  e[j] = 1.0;
  return e;
}

int SimplexDomain::lmo_index_impl(const Vector& g) const {
  int best = 0;
  for (int i = 1; i < dimension(); ++i)
    if (g[i] < g[best]) best = i;
  return best;
}

bool SimplexDomain::contains(const Vector& x, double tol) const {
  if (x.size() != dimension()) return false;
  double s = 0.0;
  for (int i = 0; i < dimension(); ++i) {
    if (!std::isfinite(x[i]) || x[i] < -tol) return false;
    s += x[i];
  }
  return std::abs(s - 1.0) <= tol;
}

PolytopeDomain::PolytopeDomain(std::vector<Vector> atoms)
    : AtomicDomain(atoms.empty() ? 0 : static_cast<int>(atoms.front().size())),
      atoms_(std::move(atoms)) {
  for (const auto& a : atoms_) {
    if (a.size() != dimension()) throw DimensionMismatch("atom dimension mismatch");
    if (!all_finite(a)) throw std::invalid_argument("atom has non-finite coordinates");
  }
  const int n = dimension();
  const int K = static_cast<int>(atoms_.size());
  Matrix U(n + 1, K);
  for (int j = 0; j < K; ++j) {
    U.col(j).head(n) = atoms_[j];
    U(n, j) = 1.0;
  }
  bary_qr_.compute(U);
}

int PolytopeDomain::lmo_index_impl(const Vector& g) const {
  int best = 0;
  double best_val = g.dot(atoms_[0]);
  for (int j = 1; j < num_atoms(); ++j) {
    const double v = g.dot(atoms_[j]);
    if (v < best_val) {
      best_val = v;
      best = j;
    }
  }
  return best;
}

bool PolytopeDomain::contains(const Vector& x, double tol) const {
  if (x.size() != dimension() || !all_finite(x)) return false;
  Vector rhs(dimension() + 1);
  rhs.head(dimension()) = x;
  rhs[dimension()] = 1.0;
  const Vector lam = bary_qr_.solve(rhs);
  for (Eigen::Index j = 0; j < lam.size(); ++j)
    if (lam[j] < -tol) return false;
  Vector rec = Vector::Zero(dimension());
  for (int j = 0; j < num_atoms(); ++j) rec += lam[j] * atoms_[j];
  return (rec - x).lpNorm<Eigen::Infinity>() <= std::max(tol, 1e-12 * x.lpNorm<Eigen::Infinity>());
}

}  // namespace cpm
