#include "cpm/smoothness.hpp"

#include <random>

namespace cpm {
namespace {

// Random point in the domain as a convex combination of two random atoms
// and a random mixing weight.
Vector random_domain_point(const AtomicDomain& dom, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, dom.num_atoms() - 1);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector x = Vector::Zero(dom.dimension());
  // Dirichlet-ish: random exponential weights over all atoms.
  double total = 0.0;
  std::vector<double> w(dom.num_atoms());
  for (auto& wi : w) {
    wi = -std::log(std::max(unif(rng), 1e-300));
    total += wi;
  }
  for (int j = 0; j < dom.num_atoms(); ++j) x += (w[j] / total) * dom.atom(j);
  return x;
}

template <typename Fn>
void for_each_sample_pair(const CompositeProblem& problem, const SamplingPlan& plan, Fn&& fn) {
  const AtomicDomain& dom = problem.domain();
  const int K = dom.num_atoms();
  if (plan.all_vertex_tuples && K <= plan.max_enumerated_atoms) {
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j)
        if (i != j) fn(dom.atom(i), dom.atom(j));
  }
  std::mt19937_64 rng(plan.seed);
  for (int s = 0; s < plan.random_points; ++s) {
    Vector x = random_domain_point(dom, rng);
    Vector v = random_domain_point(dom, rng);
    fn(x, v);
  }
}

template <typename Fn>
void for_each_sample_triple(const CompositeProblem& problem, const SamplingPlan& plan, Fn&& fn) {
  const AtomicDomain& dom = problem.domain();
  const int K = dom.num_atoms();
  if (plan.all_vertex_tuples && K <= plan.max_enumerated_atoms) {
    for (int i = 0; i < K; ++i)
      for (int j = 0; j < K; ++j)
        for (int l = 0; l < K; ++l) fn(dom.atom(i), dom.atom(j), dom.atom(l));
  }
  std::mt19937_64 rng(plan.seed);
  for (int s = 0; s < plan.random_points; ++s) {
    Vector x = random_domain_point(dom, rng);
    Vector y = random_domain_point(dom, rng);
    Vector v = random_domain_point(dom, rng);
    fn(x, y, v);
  }
}

}  // namespace

std::vector<double> SamplingPlan::default_t_grid() {
  std::vector<double> g;
  for (int e = 0; e <= 8; ++e) g.push_back(std::ldexp(1.0, -e));
  return g;
}

double taylor_value(const SmoothOracle& f, const Vector& x, const Vector& h, double t, int p) {
  if (p < 1 || p > 2) throw std::invalid_argument("taylor_value supports p in {1,2}");
  double v = f.value(x) + t * f.gradient(x).dot(h);
  if (p >= 2) v += 0.5 * t * t * f.hessian_vec(x, h).dot(h);
  return v;
}

double estimate_delta(const CompositeProblem& problem, int p, const SamplingPlan& plan) {
  if (p < 1 || p > 2) throw std::invalid_argument("estimate_delta supports p in {1,2}");
  const SmoothOracle& f = problem.smooth();
  double best = 0.0;
  for_each_sample_pair(problem, plan, [&](const Vector& x, const Vector& v) {
    const Vector h = v - x;
    const double fx = f.value(x);
    const double gh = f.gradient(x).dot(h);
    const double qh = (p >= 2) ? f.hessian_vec(x, h).dot(h) : 0.0;
    for (double t : plan.t_grid) {
      double taylor = fx + t * gh;
      if (p >= 2) taylor += 0.5 * t * t * qh;
      const double rem = std::abs(f.value(x + t * h) - taylor);
      best = std::max(best, rem / std::pow(t, p + 1));
    }
  });
  return best;
}

double estimate_gamma(const CompositeProblem& problem, int p, const SamplingPlan& plan) {
  if (p < 1 || p > 2) throw std::invalid_argument("estimate_gamma supports p in {1,2}");
  const SmoothOracle& f = problem.smooth();
  double best = 0.0;
  for_each_sample_triple(problem, plan, [&](const Vector& x, const Vector& y, const Vector& v) {
    const Vector h = v - x;
    const Vector gx = f.gradient(x);
    const Vector Hh = (p >= 2) ? f.hessian_vec(x, h) : Vector();
    for (double t : plan.t_grid) {
      Vector dev = f.gradient(x + t * h) - gx;
      if (p >= 2) dev -= t * Hh;
      const double val = std::abs(dev.dot(v - y));
      best = std::max(best, val / std::pow(t, p));
    }
  });
  return best;
}

double var_quadratic_simplex(const Matrix& A) {
  if (A.rows() != A.cols()) throw std::invalid_argument("matrix must be square");
  const int n = static_cast<int>(A.rows());
  double best = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) best = std::max(best, std::abs(A(i, i) + A(j, j) - A(i, j) - A(j, i)));
  return best;
}

LogSumExpVarBound var_logsumexp_simplex_bound(const std::vector<Vector>& a) {
  if (a.empty()) throw std::invalid_argument("need at least one coefficient vector");
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(a.front().size());
  LogSumExpVarBound out;
  for (int k = 0; k < m; ++k) {
    if (a[k].size() != n) throw DimensionMismatch("coefficient vector dimension mismatch");
    for (int l = 0; l < m; ++l)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          const double d = (a[k][i] - a[k][j]) - (a[l][i] - a[l][j]);
          out.v2 = std::max(out.v2, d * d);
          out.v3 = std::max(out.v3, std::abs(d * d * d));
        }
  }
  return out;
}

namespace {
double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}
}  // namespace

ChainReport check_inequality_chain(const SmoothnessConstants& c, double tol) {
  const int p = c.order_p;
  ChainReport rep;
  rep.delta_vs_var = {c.delta_p, c.var_p1 / factorial(p + 1),
                      c.delta_p <= c.var_p1 / factorial(p + 1) + tol};
  rep.delta_vs_gamma = {c.delta_p, c.gamma_p / (p + 1), c.delta_p <= c.gamma_p / (p + 1) + tol};
  const double gamma_cap =
      2.0 * std::pow(p + 1, p) / (factorial(p) * factorial(p)) * c.var_p1;
  rep.gamma_vs_var = {c.gamma_p, gamma_cap, c.gamma_p <= gamma_cap + tol};
  return rep;
}

BoundPair lipschitz_bound_check(const Matrix& A) {
  BoundPair out;
  out.lhs = var_quadratic_simplex(A);
  out.rhs = 4.0 * A.diagonal().maxCoeff();  // L_1 * D^2, D = 2 in l1
  return out;
}

}  // namespace cpm
