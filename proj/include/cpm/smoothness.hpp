#pragma once

#include "cpm/core.hpp"

namespace cpm {

// Sample plan for the affine-invariant characteristic estimators. All
// estimates are lower bounds on the true suprema: adding samples never
// decreases them. The t-grid stops at 2^-8, below which cancellation noise
// dominates the Taylor remainder in double precision.
struct SamplingPlan {
  bool all_vertex_tuples = true;  // enumerate atom pairs/triples when the domain is atomic
  int random_points = 50;         // extra random convex combinations
  std::vector<double> t_grid = default_t_grid();
  unsigned long long seed = 0;
  int max_enumerated_atoms = 16;  // fall back to sampling above this

  static std::vector<double> default_t_grid();
};

enum class EstimationMethod { closed_form, brute_force_atoms, sampled };

struct SmoothnessConstants {
  double delta_p = 0.0;   // Delta_Q^(p)
  double var_p1 = 0.0;    // V_Q^(p+1)
  double gamma_p = 0.0;   // Gamma_Q^(p)
  int order_p = 1;
  EstimationMethod method = EstimationMethod::sampled;
};

// Degree-p Taylor polynomial of f at x, evaluated at x + t*h (p in {1,2}).
double taylor_value(const SmoothOracle& f, const Vector& x, const Vector& h, double t, int p);

// max over samples of |f(x+t(v-x)) - Taylor_p| / t^{p+1}.
double estimate_delta(const CompositeProblem& problem, int p, const SamplingPlan& plan = {});

// max over samples of |<grad f(x+t(v-x)) - grad Taylor terms, v-y>| / t^p.
// The subtracted expansion runs through order p, so the estimate vanishes
// for polynomials of degree <= p.
double estimate_gamma(const CompositeProblem& problem, int p, const SamplingPlan& plan = {});

// Exact V^(2) of f = 0.5<Ax,x> over the standard simplex: max over vertex
// pairs of <A(e_i - e_j), e_i - e_j>.
double var_quadratic_simplex(const Matrix& A);

// Closed-form bounds for log-sum-exp over the simplex: the maximal
// difference between coordinate variations of the linear coefficients,
// squared (V^(2) bound) and cubed (V^(3) bound). Stated for mu = 1; divide
// by mu resp. mu^2 for the smoothed objective.
struct LogSumExpVarBound {
  double v2 = 0.0;
  double v3 = 0.0;
};
LogSumExpVarBound var_logsumexp_simplex_bound(const std::vector<Vector>& a);

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
  double slack() const { return rhs - lhs; }
};

// The chain Delta <= V/(p+1)!, Delta <= Gamma/(p+1), Gamma <= 2(p+1)^p/(p!)^2 V.
// Report-only; a violation beyond tol flags an estimator bug.
struct ChainReport {
  InequalityReport delta_vs_var;
  InequalityReport delta_vs_gamma;
  InequalityReport gamma_vs_var;
  bool all_ok() const { return delta_vs_var.ok && delta_vs_gamma.ok && gamma_vs_var.ok; }
};
ChainReport check_inequality_chain(const SmoothnessConstants& c, double tol = 1e-8);

// Example-2 style check in l1 over the simplex: returns (V^(2) exact,
// L_1 * D^2) with L_1 = max_i A(i,i) and D = 2.
struct BoundPair {
  double lhs = 0.0;
  double rhs = 0.0;
};
BoundPair lipschitz_bound_check(const Matrix& A);

}  // namespace cpm
