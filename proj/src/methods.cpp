#include "cpm/methods.hpp"

#include <chrono>

namespace cpm {

void EstimatingFunction::add_term(double weight, const Vector& xbar, double f_xbar,
                                  const Vector& grad_xbar) {
  if (!(weight > 0.0 && weight <= 1.0))
    throw std::invalid_argument("estimating-function weight must be in (0,1]");
  beta_ = (1.0 - weight) * beta_ + weight * (f_xbar - grad_xbar.dot(xbar));
  s_ = (1.0 - weight) * s_ + weight * grad_xbar;
  ++terms_;
}

double EstimatingFunction::minimum(const AtomicDomain& domain) const {
  if (terms_ == 0) return -kInf;
  const Vector w = domain.lmo(s_);
  return beta_ + s_.dot(w);
}

Certificate certificate_update(const Certificate& prev, EstimatingFunction& ef, double weight,
                               const Vector& xbar, double f_xbar, const Vector& grad_xbar,
                               const CompositeProblem& problem, double F_current) {
  ef.add_term(weight, xbar, f_xbar, grad_xbar);
  Certificate cert;
  cert.lower_bound = ef.minimum(problem.domain());
  cert.ell = F_current - cert.lower_bound;
  cert.best_lower = std::max(prev.best_lower, cert.lower_bound);
  return cert;
}

SubproblemStep LinearModelSolver::solve(const CompositeProblem& problem, const Vector& x_k,
                                        double gamma, long) {
  SubproblemStep step;
  const Vector g = problem.smooth().gradient(x_k);
  step.v_bar = problem.composite_lmo(g);
  step.x_bar = (1.0 - gamma) * x_k + gamma * step.v_bar;
  step.xi = 0.0;  // the linear model is minimized exactly
  step.inner_iters = 1;
  step.inner_gap = 0.0;
  if (delta1_) {
    step.delta = 2.0 * (*delta1_) * gamma * gamma;
    step.delta_validated = true;
  }
  return step;
}

QuadraticModelSolver::QuadraticModelSolver(double c, long inner_cap, SolverMode mode,
                                           std::optional<double> delta2,
                                           std::optional<double> gamma2,
                                           std::optional<double> v_estimate)
    : c_(c), cap_(inner_cap), mode_(mode), delta2_(delta2), gamma2_(gamma2),
      v_estimate_(v_estimate) {
  if (c <= 0.0) throw std::invalid_argument("c must be positive");
}

SubproblemStep QuadraticModelSolver::solve(const CompositeProblem& problem, const Vector& x_k,
                                           double gamma, long) {
  const HessianCache cache = HessianCache::build(problem, x_k);
  const long cap = cap_ > 0 ? cap_ : default_inner_cap(v_estimate_, c_, gamma);
  const InnerExit exit =
      mode_ == SolverMode::value_residual ? InnerExit::value_gap : InnerExit::stationarity_gap;
  const InnerResult inner = inner_cg_loop(problem, cache, gamma, c_, cap, exit);

  SubproblemStep step;
  step.v_bar = inner.v_bar;
  step.x_bar = (1.0 - gamma) * x_k + gamma * inner.v_bar;
  step.inner_iters = inner.iters;
  step.inner_gap = inner.gap;
  const double g3 = gamma * gamma * gamma;
  if (mode_ == SolverMode::value_residual) {
    step.xi = gamma * inner.gap;  // M-residual: m-gap scaled into y-space
    if (delta2_) {
      step.delta = (c_ + 2.0 * (*delta2_)) * g3;
      step.delta_validated = true;
    } else {
      step.delta = step.xi;
    }
  } else {
    step.xi = gamma * inner.fw_gap;
    if (gamma2_) {
      step.delta = (c_ + (*gamma2_)) * g3;
      step.delta_validated = true;
    } else {
      step.delta = step.xi;
    }
  }
  return step;
}

SubproblemStep tensor_step_p2_value(const CompositeProblem& problem, const Vector& x_k,
                                    double gamma, double c, long inner_cap,
                                    std::optional<double> delta2) {
  QuadraticModelSolver solver(c, inner_cap, SolverMode::value_residual, delta2);
  return solver.solve(problem, x_k, gamma, 0);
}

SubproblemStep tensor_step_p2_stationarity(const CompositeProblem& problem, const Vector& x_k,
                                           double gamma, double c, long inner_cap,
                                           std::optional<double> gamma2) {
  QuadraticModelSolver solver(c, inner_cap, SolverMode::stationarity, std::nullopt, gamma2);
  return solver.solve(problem, x_k, gamma, 0);
}

Vector default_start(const AtomicDomain& domain) {
  Vector x = Vector::Zero(domain.dimension());
  for (int j = 0; j < domain.num_atoms(); ++j) x += domain.atom(j);
  return x / domain.num_atoms();
}

MethodState::MethodState(const CompositeProblem& problem, Schedule sched,
                         std::optional<Vector> x0)
    : schedule(sched), ef(problem.dimension()) {
  x = x0 ? std::move(*x0) : default_start(problem.domain());
  if (!problem.domain().contains(x)) throw std::invalid_argument("x0 is infeasible");
  F = problem.composite_value(x);
}

void contracting_point_step(MethodState& state, const CompositeProblem& problem,
                            SubproblemSolver& solver, bool certificate) {
  const double gamma = state.schedule.gamma(state.k);
  // Solver failures propagate here with the state untouched.
  const SubproblemStep step = solver.solve(problem, state.x, gamma, state.k);

  if (certificate) {
    const double f_bar = problem.smooth().value(step.x_bar);
    const Vector g_bar = problem.smooth().gradient(step.x_bar);
    state.cert = certificate_update(state.cert, state.ef, gamma, step.x_bar, f_bar, g_bar,
                                    problem, state.F);
  }

  const double F_bar = problem.composite_value(step.x_bar);
  if (step_accept(F_bar, state.F)) {
    state.x = step.x_bar;
    state.F = F_bar;
  }
  state.B += static_cast<double>(state.schedule.A(state.k + 1)) * step.delta;
  ++state.k;
  if (certificate) state.cert.ell = state.F - state.cert.lower_bound;
}

namespace {

struct CounterBaseline {
  OracleCounts oracle;
  long lmo = 0;
};

CounterBaseline snapshot(const CompositeProblem& p) {
  return {p.smooth().counts(), p.domain().lmo_calls()};
}

void fill_counters(IterRecord& row, const CompositeProblem& p, const CounterBaseline& base) {
  const OracleCounts oc = p.smooth().counts();
  row.grad_calls = oc.gradient - base.oracle.gradient;
  row.hess_calls = oc.hessian - base.oracle.hessian;
  row.lmo_calls = p.domain().lmo_calls() - base.lmo;
}

}  // namespace

RunTrace contracting_run(const CompositeProblem& problem, int order_p, const RunOptions& opts) {
  if (order_p != 1 && order_p != 2)
    throw std::invalid_argument("contracting_run instantiates p in {1,2}");
  const Schedule schedule(order_p);
  const CounterBaseline base = snapshot(problem);

  Vector x = opts.x0 ? *opts.x0 : default_start(problem.domain());
  if (!problem.domain().contains(x)) throw std::invalid_argument("x0 is infeasible");
  double F = problem.composite_value(x);

  EstimatingFunction ef(problem.dimension());
  Certificate cert;

  RunTrace trace;
  trace.iters.reserve(opts.max_iters + 1);
  IterRecord row0;
  row0.k = 0;
  row0.F = F;
  fill_counters(row0, problem, base);
  trace.iters.push_back(row0);

  using clock = std::chrono::steady_clock;
  for (long k = 0; k < opts.max_iters; ++k) {
    const auto tic = clock::now();
    const double gamma = schedule.gamma(k);

    // First-order data at x_k; p = 2 additionally caches the Hessian.
    Vector grad_xk;
    std::optional<HessianCache> cache;
    if (order_p == 2) {
      cache = HessianCache::build(problem, x);
      grad_xk = cache->grad;
    } else {
      grad_xk = problem.smooth().gradient(x);
    }

    // Certificate for the current iterate: phi_k aggregates the
    // linearization at x_k with weight a_k/A_k = gamma_{k-1}.
    if (opts.certificate && k >= 1) {
      cert = certificate_update(cert, ef, schedule.gamma(k - 1), x, F, grad_xk, problem, F);
      trace.iters[k].ell = cert.ell;
      trace.iters[k].lower_bound = cert.lower_bound;
    }

    IterRecord row;
    row.k = k + 1;
    bool cap_hit = false;
    Vector x_bar;
    if (order_p == 1) {
      const int j = problem.domain().lmo_index(grad_xk);
      x_bar = (1.0 - gamma) * x;
      x_bar += gamma * problem.domain().atom(j);
      row.inner_iters = 1;
    } else {
      const long cap =
          opts.inner_cap > 0 ? opts.inner_cap : default_inner_cap(opts.v_estimate, opts.c, gamma);
      try {
        const InnerResult inner =
            inner_cg_loop(problem, *cache, gamma, opts.c, cap, opts.exit_mode);
        x_bar = (1.0 - gamma) * x + gamma * inner.v_bar;
        row.inner_iters = inner.iters;
      } catch (const InnerCapExceeded& e) {
        cap_hit = true;
        row.inner_iters = e.iters;
        if (!opts.cap_skip) {
          trace.aborted = true;
          trace.abort_reason = "inner cap exceeded at k=" + std::to_string(k) +
                               " (best gap " + std::to_string(e.best_gap) + ")";
          return trace;
        }
      }
    }

    row.inner_cap_hit = cap_hit;
    if (!cap_hit) {
      const double F_bar = problem.composite_value(x_bar);
      if (step_accept(F_bar, F)) {
        x = x_bar;
        F = F_bar;
        row.accepted = true;
      } else {
        row.accepted = false;
      }
    } else {
      row.accepted = false;  // run continues from x_k
    }
    row.F = F;
    fill_counters(row, problem, base);
    row.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - tic).count();
    trace.iters.push_back(row);
  }

  // The final row has no fresh gradient; close it with the running best
  // lower bound, which is still a valid certificate.
  if (opts.certificate && std::isfinite(cert.best_lower)) {
    IterRecord& last = trace.iters.back();
    if (!std::isfinite(last.ell)) {
      last.ell = last.F - cert.best_lower;
      last.lower_bound = cert.best_lower;
    }
  }
  return trace;
}

RunTrace frank_wolfe_run(const CompositeProblem& problem, long iters, bool certificate) {
  RunOptions opts;
  opts.max_iters = iters;
  opts.certificate = certificate;
  return contracting_run(problem, 1, opts);
}

RunTrace method_ii_run(const CompositeProblem& problem, const RunOptions& opts) {
  RunOptions o = opts;
  o.exit_mode = InnerExit::stationarity_gap;
  return contracting_run(problem, 2, o);
}

double loglog_slope(const RunTrace& trace, long k_lo, long k_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  long n = 0;
  for (const auto& r : trace.iters) {
    if (r.k < k_lo || r.k > k_hi) continue;
    if (!std::isfinite(r.ell) || r.ell <= 0.0) continue;
    const double lx = std::log(static_cast<double>(r.k));
    const double ly = std::log(r.ell);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) return kNaN;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace cpm
