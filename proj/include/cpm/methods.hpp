#pragma once

#include "cpm/core.hpp"
#include "cpm/newton.hpp"

namespace cpm {

//
// Estimating function phi_k(v) = sum_i a_i [f(xb_i) + <grad f(xb_i), v - xb_i> + psi(v)],
// stored in normalized form phi_k/A_k = beta + <s, v> (+ psi). The
// normalized recurrence uses the contraction weights gamma directly, so no
// unbounded A_k accumulation appears.
//
class EstimatingFunction {
 public:
  explicit EstimatingFunction(int dimension) : s_(Vector::Zero(dimension)) {}

  // weight = a_{k+1}/A_{k+1}, i.e. gamma_k of the schedule that generated
  // the test point stream.
  void add_term(double weight, const Vector& xbar, double f_xbar, const Vector& grad_xbar);

  // phi_k(v)/A_k for feasible v (psi = 0 there).
  double value(const Vector& v) const { return beta_ + s_.dot(v); }
  // phi_k*/A_k through one LMO call.
  double minimum(const AtomicDomain& domain) const;

  long terms() const { return terms_; }
  const Vector& slope() const { return s_; }
  double offset() const { return beta_; }

 private:
  double beta_ = 0.0;
  Vector s_;
  long terms_ = 0;
};

struct Certificate {
  double ell = kInf;            // F(x_k) - phi_k*/A_k
  double lower_bound = -kInf;   // phi_k*/A_k  <= F*
  double best_lower = -kInf;    // running max of lower_bound
};

// Adds the next linearization to phi and recomputes the certificate; the
// only oracle work is one LMO.
Certificate certificate_update(const Certificate& prev, EstimatingFunction& ef, double weight,
                               const Vector& xbar, double f_xbar, const Vector& grad_xbar,
                               const CompositeProblem& problem, double F_current);

enum class SolverMode { value_residual, stationarity };

struct SubproblemStep {
  Vector v_bar;                 // feasible inner point
  Vector x_bar;                 // (1 - gamma) x_k + gamma v_bar
  double xi = 0.0;              // achieved tolerance in the solver's mode
  double delta = 0.0;           // delta_{k+1} for B_k bookkeeping
  bool delta_validated = false; // true when backed by a known constant
  long inner_iters = 0;
  double inner_gap = 0.0;
};

class SubproblemSolver {
 public:
  virtual ~SubproblemSolver() = default;
  virtual SolverMode mode() const = 0;
  virtual SubproblemStep solve(const CompositeProblem& problem, const Vector& x_k, double gamma,
                               long k) = 0;
};

// p = 1 tensor step: the linearized model is minimized exactly by one LMO
// call, so xi = 0 in both inexactness modes. delta = 2 Delta^(1) gamma^2
// when the constant is supplied.
class LinearModelSolver final : public SubproblemSolver {
 public:
  explicit LinearModelSolver(std::optional<double> delta1 = {}) : delta1_(delta1) {}
  SolverMode mode() const override { return SolverMode::stationarity; }
  SubproblemStep solve(const CompositeProblem& problem, const Vector& x_k, double gamma,
                       long k) override;

 private:
  std::optional<double> delta1_;
};

// p = 2 tensor step through the inner conditional-gradient loop.
class QuadraticModelSolver final : public SubproblemSolver {
 public:
  QuadraticModelSolver(double c, long inner_cap, SolverMode mode,
                       std::optional<double> delta2 = {}, std::optional<double> gamma2 = {},
                       std::optional<double> v_estimate = {});
  SolverMode mode() const override { return mode_; }
  SubproblemStep solve(const CompositeProblem& problem, const Vector& x_k, double gamma,
                       long k) override;

 private:
  double c_;
  long cap_;
  SolverMode mode_;
  std::optional<double> delta2_, gamma2_, v_estimate_;
};

SubproblemStep tensor_step_p2_value(const CompositeProblem& problem, const Vector& x_k,
                                    double gamma, double c, long inner_cap = 0,
                                    std::optional<double> delta2 = {});
SubproblemStep tensor_step_p2_stationarity(const CompositeProblem& problem, const Vector& x_k,
                                           double gamma, double c, long inner_cap = 0,
                                           std::optional<double> gamma2 = {});

// Barycenter of the atom list; affine-equivariant default start.
Vector default_start(const AtomicDomain& domain);

struct MethodState {
  Vector x;
  double F = kNaN;
  long k = 0;
  double B = 0.0;  // sum_i A_i delta_i
  Schedule schedule;
  EstimatingFunction ef;
  Certificate cert;

  MethodState(const CompositeProblem& problem, Schedule sched,
              std::optional<Vector> x0 = std::nullopt);
};

// One outer iteration of the conceptual contracting-point scheme: solver
// candidate, monotone acceptance, A/B bookkeeping, optional certificate.
// Solver failures propagate and leave the state unchanged.
void contracting_point_step(MethodState& state, const CompositeProblem& problem,
                            SubproblemSolver& solver, bool certificate);

struct RunOptions {
  long max_iters = 100;
  bool certificate = false;
  double c = 1.0;      // p = 2 inner accuracy constant
  long inner_cap = 0;  // 0: automatic
  std::optional<double> v_estimate;
  std::optional<double> delta_p;  // Delta^(p) for delta reporting
  std::optional<double> gamma_p;  // Gamma^(p) for delta reporting
  InnerExit exit_mode = InnerExit::value_gap;
  bool cap_skip = false;  // record cap hits and continue instead of aborting
  std::optional<Vector> x0;
};

// Shared outer driver for the tensor instantiations. p = 1 is Frank-Wolfe;
// p = 2 with the value exit is Inexact Contracting Newton; p = 2 with the
// stationarity exit is the method-II style run whose certificate stream is
// covered by the Gamma-based analysis. One gradient (plus one Hessian for
// p = 2) per outer iteration; certificates cost one extra LMO each.
RunTrace contracting_run(const CompositeProblem& problem, int order_p, const RunOptions& opts);

RunTrace frank_wolfe_run(const CompositeProblem& problem, long iters, bool certificate = false);
RunTrace method_ii_run(const CompositeProblem& problem, const RunOptions& opts);

// Least-squares slope of log(ell_k) against log(k) over rows with finite
// positive certificates and k in [k_lo, k_hi].
double loglog_slope(const RunTrace& trace, long k_lo, long k_hi);

}  // namespace cpm
