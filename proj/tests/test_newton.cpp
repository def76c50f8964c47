#include <doctest.h>

#include <random>

#include "cpm/bench.hpp"
#include "cpm/newton.hpp"
#include "cpm/oracles.hpp"
#include "support.hpp"

using namespace cpm;

namespace {

std::shared_ptr<CompositeProblem> quadratic_simplex(const Matrix& A) {
  return std::make_shared<CompositeProblem>(std::make_shared<QuadraticOracle>(A),
                                            std::make_shared<SimplexDomain>(A.rows()));
}

}  // namespace

TEST_CASE("model_gradient") {
  auto problem = quadratic_simplex(Matrix::Identity(2, 2));
  Vector x(2);
  x << 0.5, 0.5;
  const HessianCache cache = HessianCache::build(*problem, x);

  SUBCASE("v = x_k gives grad f") {
    CHECK(model_gradient(cache, 0.7, x).isApprox(cache.grad, 1e-14));
  }
  SUBCASE("gamma = 0 gives grad f for any v") {
    Vector v(2);
    v << 0.9, 0.1;
    CHECK(model_gradient(cache, 0.0, v).isApprox(cache.grad, 1e-14));
  }
  SUBCASE("hand value: f = 0.5|x|^2, gamma = 1, v = e1") {
    Vector v(2);
    v << 1.0, 0.0;
    Vector expect(2);
    expect << 1.0, 0.0;  // x + (v - x)
    CHECK(model_gradient(cache, 1.0, v).isApprox(expect, 1e-14));
    // dense matvec cross-check
    CHECK(model_gradient(cache, 1.0, v).isApprox(Vector(cache.grad + cache.H * (v - x)), 1e-14));
  }
}

TEST_CASE("model_value_from_gradient") {
  std::mt19937_64 rng(2);
  const Matrix A = testing::random_psd(rng, 4);
  auto problem = quadratic_simplex(A);
  const Vector x = testing::random_simplex_point(rng, 4);
  const HessianCache cache = HessianCache::build(*problem, x);

  SUBCASE("z = x_k gives zero") {
    CHECK(model_value_from_gradient(cache, x, cache.grad) == doctest::Approx(0.0));
  }
  SUBCASE("matches the direct formula on random points") {
    for (int trial = 0; trial < 20; ++trial) {
      const Vector z = testing::random_simplex_point(rng, 4);
      const double gamma = 0.3 + 0.1 * (trial % 7);
      const Vector gz = model_gradient(cache, gamma, z);
      const double direct =
          cache.grad.dot(z - x) + 0.5 * gamma * (z - x).dot(cache.H * (z - x));
      CHECK(model_value_from_gradient(cache, z, gz) == doctest::Approx(direct).epsilon(1e-10));
    }
  }
  SUBCASE("gamma = 0 reduces to the linear term") {
    const Vector z = testing::random_simplex_point(rng, 4);
    const Vector gz = model_gradient(cache, 0.0, z);
    CHECK(model_value_from_gradient(cache, z, gz) ==
          doctest::Approx(cache.grad.dot(z - x)).epsilon(1e-12));
  }
}

TEST_CASE("inner loop exits immediately on a linear objective") {
  Vector c(3);
  c << 0.2, -0.5, 0.8;
  auto problem = std::make_shared<CompositeProblem>(std::make_shared<LinearOracle>(c),
                                                    std::make_shared<SimplexDomain>(3));
  const Vector x0 = Vector::Constant(3, 1.0 / 3);
  const HessianCache cache = HessianCache::build(*problem, x0);
  const InnerResult res = inner_cg_loop(*problem, cache, 0.5, 1e-12, 100);
  CHECK(res.iters == 1);
  CHECK(res.gap <= 1e-14);
}

TEST_CASE("inner loop reaches the grid-search optimum within c") {
  auto problem = quadratic_simplex(Matrix::Identity(2, 2));
  Vector x(2);
  x << 1.0, 0.0;
  const HessianCache cache = HessianCache::build(*problem, x);
  const double c = 1e-6, gamma = 1.0;
  const InnerResult res =
      inner_cg_loop(*problem, cache, gamma, c, default_inner_cap(2.0, c, gamma));
  auto m_k = [&](const Vector& v) {
    return cache.grad.dot(v - x) + 0.5 * gamma * (v - x).dot(cache.H * (v - x));
  };
  const double m_star_grid = testing::simplex_grid_min(m_k, 2, 1e-4);
  CHECK(m_k(res.v_bar) - m_star_grid <= c + 1e-9);
  CHECK(res.gap <= c * gamma * gamma);
}

TEST_CASE("gradient recurrence equals direct evaluation") {
  std::mt19937_64 rng(7);
  const Matrix A = testing::random_psd(rng, 5);
  auto problem = quadratic_simplex(A);
  const Vector x = testing::random_simplex_point(rng, 5);
  const HessianCache cache = HessianCache::build(*problem, x);
  const double gamma = 0.6;
  // run a few iterations manually with the recurrence and compare
  Vector z = x;
  Vector grad = cache.grad;
  for (long t = 0; t < 25; ++t) {
    const double alpha = 2.0 / (t + 2);
    const int j = static_cast<int>(t % 5);
    const Vector w = problem->domain().atom(j);
    z = (1.0 - alpha) * z + alpha * w;
    grad = alpha * (cache.grad + gamma * (cache.col(j) - cache.Hx)) + (1.0 - alpha) * grad;
    CHECK((grad - model_gradient(cache, gamma, z)).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("icn on a quadratic: first step solves to model accuracy") {
  std::mt19937_64 rng(3);
  const Matrix A = testing::random_psd(rng, 4, 0.1);
  auto problem = quadratic_simplex(A);
  const double c = 1e-6;
  IcnOptions opts;
  opts.c = c;
  opts.max_outer = 1;
  opts.v_estimate = var_quadratic_simplex(A);
  const RunTrace trace = icn_run(*problem, opts);
  const double F_star = testing::simplex_qp_min(A, Vector::Zero(4)).value;
  // gamma_0 = 1: the model equals f, so the residual is at most the value gap <= c
  CHECK(trace.iters[1].F - F_star <= c + 1e-12);
}

TEST_CASE("icn on a desk softmax instance") {
  const auto inst = bench::generate_instance(20, 50, 0.1, 0);
  auto problem = bench::make_softmax_problem(inst);
  IcnOptions opts;
  opts.max_outer = 100;
  opts.certificate = true;
  const RunTrace trace = icn_run(*problem, opts);
  CHECK(trace.monotone());
  // ell_k * k^2 stays bounded on k in [10, 100]; the regression guard is a
  // frozen empirical envelope for this seed (measured max ~2.7).
  double worst = 0.0;
  for (const auto& r : trace.iters)
    if (r.k >= 10 && r.k <= 100 && std::isfinite(r.ell))
      worst = std::max(worst, r.ell * double(r.k) * double(r.k));
  CHECK(worst > 0.0);
  CHECK(worst <= 10.0);
}

TEST_CASE("icn oracle accounting: one gradient and one hessian per outer step") {
  const auto inst = bench::generate_instance(8, 15, 0.5, 4);
  auto problem = bench::make_softmax_problem(inst);
  problem->smooth().reset_counters();
  problem->domain().reset_lmo_calls();
  IcnOptions opts;
  opts.max_outer = 25;
  const RunTrace trace = icn_run(*problem, opts);
  const OracleCounts oc = problem->smooth().counts();
  CHECK(oc.gradient == 25);
  CHECK(oc.hessian == 25);
  // lmo calls equal total inner iterations (no certificates here)
  long inner_total = 0;
  for (const auto& r : trace.iters) inner_total += r.inner_iters;
  CHECK(problem->domain().lmo_calls() == inner_total);

  // with certificates: one extra lmo per outer iteration from k >= 1,
  // plus unchanged gradient growth
  problem->smooth().reset_counters();
  problem->domain().reset_lmo_calls();
  opts.certificate = true;
  const RunTrace trace2 = icn_run(*problem, opts);
  CHECK(problem->smooth().counts().gradient == 25);
  long inner2 = 0;
  for (const auto& r : trace2.iters) inner2 += r.inner_iters;
  CHECK(problem->domain().lmo_calls() == inner2 + 24);
}

TEST_CASE("choose_c") {
  CHECK(choose_c(4.0, 1.0) == doctest::Approx(4.0));
  CHECK(choose_c(0.0, 1.0) == doctest::Approx(1e-6));  // clamped: the scheme needs c > 0
  CHECK(choose_c(std::nullopt, 1.0) == doctest::Approx(1.0));
  CHECK(choose_c(4.0, std::nullopt) == doctest::Approx(1.0));
  CHECK_THROWS_AS(choose_c(-1.0, 2.0), std::invalid_argument);
}

TEST_CASE("inner certificate dominates the true model gap") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix A = testing::random_psd(rng, 3, 0.05);
    auto problem = quadratic_simplex(A);
    const Vector x = testing::random_simplex_point(rng, 3);
    const HessianCache cache = HessianCache::build(*problem, x);
    const double gamma = 0.5, c = 1e-4;
    const InnerResult res =
        inner_cg_loop(*problem, cache, gamma, c, default_inner_cap(10.0, c, gamma));
    auto m_k = [&](const Vector& v) {
      return cache.grad.dot(v - x) + 0.5 * gamma * (v - x).dot(cache.H * (v - x));
    };
    // m_k(v) in QP normal form: 0.5 v'(gamma A)v + (g0 - gamma A x)'v + const
    const auto qp = testing::simplex_qp_min(gamma * A, Vector(cache.grad - gamma * (A * x)));
    const double m_star = qp.value - cache.grad.dot(x) + 0.5 * gamma * x.dot(A * x);
    CHECK(m_k(res.v_bar) - m_star <= res.gap + 1e-12);
    CHECK(res.gap <= c * gamma * gamma);
  }
}

TEST_CASE("inner iteration count obeys the 2V/(c gamma) bound") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + (trial % 4);
    const Matrix A = testing::random_psd(rng, n, 0.05);
    auto problem = quadratic_simplex(A);
    const double V = var_quadratic_simplex(A);
    IcnOptions opts;
    opts.c = 0.5;
    opts.max_outer = 20;
    opts.v_estimate = V;
    const RunTrace trace = icn_run(*problem, opts);
    for (const auto& r : trace.iters) {
      if (r.k == 0) continue;
      const double gamma = 3.0 / (r.k - 1 + 3);
      CHECK(r.inner_iters <= std::ceil(2.0 * V / (opts.c * gamma)) + 1);
    }
  }
}

TEST_CASE("estimating-function recursion of the inner loop") {
  // A_{t+1} phi*_{t+1} >= A_{t+1} m(z_{t+1}) - B_{t+1} with
  // B_t = (gamma V / 2) sum a_{i+1}^2 / A_{i+1}, A_t = t(t+1).
  std::mt19937_64 rng(23);
  const Matrix A = testing::random_psd(rng, 3, 0.05);
  auto problem = quadratic_simplex(A);
  const double V = var_quadratic_simplex(A);
  const Vector x = testing::random_simplex_point(rng, 3);
  const double gamma = 0.6;
  // naive replay with explicit phi tracking
  const Vector g0 = problem->smooth().gradient(x);
  const Matrix H = problem->smooth().hessian(x);
  auto m_k = [&](const Vector& v) {
    return g0.dot(v - x) + 0.5 * gamma * (v - x).dot(H * (v - x));
  };
  Vector z = x;
  Vector h = Vector::Zero(3);
  double beta = 0.0, B = 0.0;
  for (long t = 0; t < 40; ++t) {
    const double alpha = 2.0 / (t + 2);
    const Vector gz = g0 + gamma * (H * (z - x));
    beta = alpha * (m_k(z) - gz.dot(z)) + (1.0 - alpha) * beta;
    h = alpha * gz + (1.0 - alpha) * h;
    const int j = problem->domain().lmo_index(h);
    const Vector w = problem->domain().atom(j);
    const double phi_star = beta + h.dot(w);
    z = (1.0 - alpha) * z + alpha * w;
    const double A_next = double((t + 1) * (t + 2));
    const double a_next = 2.0 * (t + 1);
    B += (gamma * V / 2.0) * a_next * a_next / A_next;
    CHECK(A_next * phi_star >= A_next * m_k(z) - B - 1e-9);
  }
}

TEST_CASE("fast path matches naive dense recomputation") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4 + (trial % 5);
    const Matrix A = testing::random_psd(rng, n, 0.05);
    auto problem = quadratic_simplex(A);
    const Vector x = testing::random_simplex_point(rng, n);
    const double gamma = 1.0 / (1 + (trial % 3));
    const double c = 1e-3;
    const HessianCache cache = HessianCache::build(*problem, x);
    const long cap = default_inner_cap(var_quadratic_simplex(A), c, gamma);
    const InnerResult fast = inner_cg_loop(*problem, cache, gamma, c, cap);
    const auto naive =
        testing::naive_inner_loop(x, cache.grad, cache.H, problem->domain(), gamma, c, cap);
    CHECK(fast.iters == naive.iters);
    CHECK((fast.v_bar - naive.z).lpNorm<Eigen::Infinity>() <= 1e-12);
    // one Hessian-column access per inner iteration
    CHECK(fast.hess_col_reads == fast.iters);
  }
}

TEST_CASE("inner cap exhaustion carries the best gap") {
  auto problem = quadratic_simplex(Matrix::Identity(4, 4));
  Vector x(4);
  x << 1.0, 0.0, 0.0, 0.0;
  const HessianCache cache = HessianCache::build(*problem, x);
  CHECK_THROWS_AS(inner_cg_loop(*problem, cache, 1.0, 1e-12, 3), InnerCapExceeded);
  try {
    inner_cg_loop(*problem, cache, 1.0, 1e-12, 3);
  } catch (const InnerCapExceeded& e) {
    CHECK(e.iters == 3);
    CHECK(std::isfinite(e.best_gap));
    CHECK(e.best_gap > 0.0);
  }
}
