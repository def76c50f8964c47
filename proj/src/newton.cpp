#include "cpm/newton.hpp"

#include "cpm/methods.hpp"

namespace cpm {

HessianCache HessianCache::build(const CompositeProblem& problem, const Vector& x_k) {
  HessianCache cache;
  cache.x = x_k;
  cache.grad = problem.smooth().gradient(x_k);
  cache.H = problem.smooth().hessian(x_k);
  cache.Hx = cache.H * x_k;
  return cache;
}

Vector model_gradient(const HessianCache& cache, double gamma, const Vector& v) {
  return cache.grad + gamma * (cache.H * v - cache.Hx);
}

double model_value_from_gradient(const HessianCache& cache, const Vector& z,
                                 const Vector& grad_gk_z) {
  return 0.5 * (cache.grad + grad_gk_z).dot(z - cache.x);
}

long default_inner_cap(std::optional<double> v_estimate, double c, double gamma) {
  if (v_estimate && *v_estimate >= 0.0) {
    const double t = 10.0 * (2.0 * (*v_estimate) / (c * gamma) + 1.0);
    return static_cast<long>(std::ceil(std::min(t, 1e12)));
  }
  return 10000;
}

double choose_c(std::optional<double> V, std::optional<double> Delta) {
  if (!V || !Delta) return 1.0;
  if (*V < 0.0 || *Delta < 0.0) throw std::invalid_argument("smoothness constants must be >= 0");
  const double c = 2.0 * std::sqrt((*V) * (*Delta));
  return std::max(c, 1e-6);  // the scheme requires c > 0
}

InnerResult inner_cg_loop(const CompositeProblem& problem, const HessianCache& cache,
                          double gamma, double c, long cap, InnerExit exit_mode) {
  if (gamma <= 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must be in (0,1]");
  if (c <= 0.0) throw std::invalid_argument("inner accuracy constant c must be positive");
  if (cap <= 0) throw std::invalid_argument("inner cap must be positive");

  const AtomicDomain& dom = problem.domain();
  const bool fast = dom.is_standard_simplex();
  const double threshold = c * gamma * gamma;

  // z_0 = x_k, so grad g(z_0) = grad f(x_k) and g(z_0) = 0.
  Vector z = cache.x;
  Vector grad_gz = cache.grad;
  double g_val = 0.0;
  // phi_{t+1}(w) = beta_t + <h_t, w> (+ psi); h_{-1} = 0.
  Vector h = Vector::Zero(dom.dimension());
  double beta = 0.0;

  double best_gap = kInf;
  for (long t = 0; t < cap; ++t) {
    const double alpha = 2.0 / (t + 2);
    // 4-b: aggregate the linearization of g at z_t.
    beta = alpha * (g_val - grad_gz.dot(z)) + (1.0 - alpha) * beta;
    h = alpha * grad_gz + (1.0 - alpha) * h;
    // 4-c: w_{t+1} minimizes the affine phi_{t+1} at an atom.
    const int j = dom.lmo_index(h);
    const Vector w = dom.atom(j);
    const double phi_star = beta + h.dot(w);
    // 4-d
    z *= (1.0 - alpha);
    z += alpha * w;
    // gradient recurrence; one Hessian column on the simplex fast path.
    const Vector Hw = fast ? cache.col(j) : Vector(cache.H * w);
    grad_gz = alpha * (cache.grad + gamma * (Hw - cache.Hx)) + (1.0 - alpha) * grad_gz;
    g_val = model_value_from_gradient(cache, z, grad_gz);

    const double gap = g_val - phi_star;
    if (exit_mode == InnerExit::value_gap) {
      best_gap = std::min(best_gap, gap);
      if (gap <= threshold) {
        InnerResult res{z, t + 1, gap, kNaN, phi_star, cache.col_reads};
        return res;
      }
    } else {
      const int jg = dom.lmo_index(grad_gz);
      const double fw_gap = grad_gz.dot(z) - grad_gz.dot(dom.atom(jg));
      best_gap = std::min(best_gap, fw_gap);
      if (fw_gap <= threshold) {
        InnerResult res{z, t + 1, gap, fw_gap, phi_star, cache.col_reads};
        return res;
      }
    }
  }
  throw InnerCapExceeded(best_gap, cap);
}

RunTrace icn_run(const CompositeProblem& problem, const IcnOptions& opts) {
  RunOptions ro;
  ro.max_iters = opts.max_outer;
  ro.certificate = opts.certificate;
  ro.c = opts.c;
  ro.inner_cap = opts.inner_cap;
  ro.v_estimate = opts.v_estimate;
  ro.delta_p = opts.delta2;
  ro.exit_mode = opts.exit_mode;
  ro.cap_skip = (opts.cap_policy == IcnOptions::CapPolicy::skip_iteration);
  return contracting_run(problem, 2, ro);
}

}  // namespace cpm
