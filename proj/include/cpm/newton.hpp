#pragma once

#include "cpm/core.hpp"

namespace cpm {

// Second-order data prepared once per outer iteration: gradient, dense
// Hessian and the product H*x_k. Column reads are counted so tests can
// verify the O(n) inner-step contract.
struct HessianCache {
  Vector x;     // x_k
  Vector grad;  // grad f(x_k)
  Matrix H;     // hess f(x_k)
  Vector Hx;    // H * x_k
  mutable long col_reads = 0;

  // Costs exactly one gradient and one Hessian oracle call.
  static HessianCache build(const CompositeProblem& problem, const Vector& x_k);

  Vector col(int j) const {
    ++col_reads;
    return H.col(j);
  }
};

// grad g_k(v) = grad f(x_k) + gamma * H (v - x_k)
Vector model_gradient(const HessianCache& cache, double gamma, const Vector& v);

// g_k(z) = 0.5 <grad f(x_k) + grad g_k(z), z - x_k>; no Hessian products.
double model_value_from_gradient(const HessianCache& cache, const Vector& z,
                                 const Vector& grad_gk_z);

enum class InnerExit {
  value_gap,         // g(z_{t+1}) + psi - phi_{t+1}(w_{t+1}) <= c gamma^2
  stationarity_gap,  // max_w <grad g(z_{t+1}), z_{t+1} - w> <= c gamma^2
};

struct InnerResult {
  Vector v_bar;          // z_{t+1} at exit
  long iters = 0;        // inner iterations executed (= LMO calls on phi)
  double gap = 0.0;      // value gap at exit
  double fw_gap = kNaN;  // stationarity gap (when the exit mode computes it)
  double phi_star = 0.0;
  long hess_col_reads = 0;
};

struct InnerCapExceeded : std::runtime_error {
  double best_gap;
  long iters;
  InnerCapExceeded(double g, long t)
      : std::runtime_error("inner conditional-gradient loop hit its iteration cap"),
        best_gap(g),
        iters(t) {}
};

// Conditional-gradient loop on the contracted quadratic model
//   g_k(v) = <grad f(x_k), v - x_k> + (gamma/2) <H (v - x_k), v - x_k>.
// On the standard simplex each iteration costs O(n): one Hessian column,
// one coordinate argmin, vector updates. Throws InnerCapExceeded when the
// exit test does not trigger within `cap` iterations.
InnerResult inner_cg_loop(const CompositeProblem& problem, const HessianCache& cache,
                          double gamma, double c, long cap,
                          InnerExit exit_mode = InnerExit::value_gap);

// 10 * (2 V / (c gamma) + 1) when V is known, otherwise 1e4.
long default_inner_cap(std::optional<double> v_estimate, double c, double gamma);

// c = 2 sqrt(V Delta); falls back to 1.0 when either constant is unknown
// and clamps to 1e-6 when the product vanishes (the scheme needs c > 0).
double choose_c(std::optional<double> V, std::optional<double> Delta);

struct IcnOptions {
  double c = 1.0;
  long max_outer = 100;
  long inner_cap = 0;  // 0: derive via default_inner_cap
  bool certificate = false;
  std::optional<double> v_estimate;  // V^(2): inner-cap sizing + delta reporting
  std::optional<double> delta2;      // Delta^(2): delta reporting
  InnerExit exit_mode = InnerExit::value_gap;
  // On cap exhaustion: stop with a partial trace, or record and continue
  // from x_k with the schedule still advancing.
  enum class CapPolicy { propagate, skip_iteration };
  CapPolicy cap_policy = CapPolicy::propagate;
};

// Inexact Contracting Newton: outer schedule gamma_k = 3/(k+3), inner
// conditional-gradient model minimization to accuracy c gamma_k^2.
RunTrace icn_run(const CompositeProblem& problem, const IcnOptions& opts);

}  // namespace cpm
