#pragma once

// Test-only oracles, kept independent of the library implementation paths
// they are used to check.

#include <random>
#include <vector>

#include "cpm/core.hpp"

namespace cpm::testing {

// Central finite-difference gradient of a value oracle.
template <typename F>
Vector fd_gradient(F&& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return g;
}

// Central finite-difference Hessian from a gradient oracle.
template <typename G>
Matrix fd_hessian(G&& grad, const Vector& x, double h = 1e-6) {
  const Eigen::Index n = x.size();
  Matrix H(n, n);
  Vector xp = x, xm = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    H.col(i) = (grad(xp) - grad(xm)) / (2.0 * h);
    xp[i] = x[i];
    xm[i] = x[i];
  }
  return 0.5 * (H + H.transpose());
}

inline Vector random_simplex_point(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector x(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    x[i] = -std::log(std::max(unif(rng), 1e-300));
    total += x[i];
  }
  return x / total;
}

inline Matrix random_psd(std::mt19937_64& rng, int n, double ridge = 0.0) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix B(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B(i, j) = normal(rng);
  Matrix A = B.transpose() * B / n;
  A.diagonal().array() += ridge;
  return A;
}

// Exact minimizer of 0.5 x'Ax + b'x over the standard simplex by support
// enumeration: every KKT-stationary candidate on every face, plus all
// vertices. Exact for PSD A up to linear-solver roundoff; exponential in n
// by design (test oracle, n <= ~12).
struct SimplexQpResult {
  double value = kInf;
  Vector x;
};

inline SimplexQpResult simplex_qp_min(const Matrix& A, const Vector& b) {
  const int n = static_cast<int>(A.rows());
  SimplexQpResult best;
  auto consider = [&](const Vector& x) {
    for (int i = 0; i < n; ++i)
      if (x[i] < -1e-10) return;
    const double v = 0.5 * x.dot(A * x) + b.dot(x);
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
  };
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    if (k == 1) {
      Vector x = Vector::Zero(n);
      x[idx[0]] = 1.0;
      consider(x);
      continue;
    }
    Matrix K(k + 1, k + 1);
    Vector rhs(k + 1);
    for (int r = 0; r < k; ++r) {
      for (int c = 0; c < k; ++c) K(r, c) = A(idx[r], idx[c]);
      K(r, k) = 1.0;
      K(k, r) = 1.0;
      rhs[r] = -b[idx[r]];
    }
    K(k, k) = 0.0;
    rhs[k] = 1.0;
    Eigen::FullPivLU<Matrix> lu(K);
    if (!lu.isInvertible()) continue;
    const Vector sol = lu.solve(rhs);
    Vector x = Vector::Zero(n);
    for (int r = 0; r < k; ++r) x[idx[r]] = sol[r];
    consider(x);
  }
  return best;
}

// Grid search for min of a callable over the simplex, n in {2, 3}.
template <typename F>
double simplex_grid_min(F&& f, int n, double step) {
  double best = kInf;
  if (n == 2) {
    for (double s = 0.0; s <= 1.0 + 1e-12; s += step) {
      Vector x(2);
      x << s, 1.0 - s;
      best = std::min(best, f(x));
    }
  } else if (n == 3) {
    for (double s = 0.0; s <= 1.0 + 1e-12; s += step)
      for (double t = 0.0; s + t <= 1.0 + 1e-12; t += step) {
        Vector x(3);
        x << s, t, 1.0 - s - t;
        best = std::min(best, f(x));
      }
  } else {
    throw std::invalid_argument("grid search supports n in {2,3}");
  }
  return best;
}

// Scheme-31 inner loop with the model gradient recomputed from scratch by
// dense matrix products each iteration; reference for the O(n) fast path.
struct NaiveInnerResult {
  std::vector<Vector> z_history;
  Vector z;
  long iters = 0;
  double gap = 0.0;
};

inline NaiveInnerResult naive_inner_loop(const Vector& x_k, const Vector& g0, const Matrix& H,
                                         const cpm::AtomicDomain& dom, double gamma, double c,
                                         long cap) {
  NaiveInnerResult out;
  Vector z = x_k;
  Vector h = Vector::Zero(x_k.size());
  double beta = 0.0;
  auto model_grad = [&](const Vector& v) -> Vector { return g0 + gamma * (H * (v - x_k)); };
  auto model_val = [&](const Vector& v) -> double {
    return g0.dot(v - x_k) + 0.5 * gamma * (v - x_k).dot(H * (v - x_k));
  };
  for (long t = 0; t < cap; ++t) {
    const double alpha = 2.0 / (t + 2);
    const Vector gz = model_grad(z);
    beta = alpha * (model_val(z) - gz.dot(z)) + (1.0 - alpha) * beta;
    h = alpha * gz + (1.0 - alpha) * h;
    const int j = dom.lmo_index(h);
    const Vector w = dom.atom(j);
    const double phi_star = beta + h.dot(w);
    z = (1.0 - alpha) * z + alpha * w;
    out.z_history.push_back(z);
    const double gap = model_val(z) - phi_star;
    if (gap <= c * gamma * gamma) {
      out.z = z;
      out.iters = t + 1;
      out.gap = gap;
      return out;
    }
  }
  throw std::runtime_error("naive inner loop hit the cap");
}

}  // namespace cpm::testing
