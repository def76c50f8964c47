#pragma once

#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cpm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_finite(const Vector& x);

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Snapshot of oracle call counters.
struct OracleCounts {
  long value = 0;
  long gradient = 0;
  long hessian = 0;
  long hessian_vec = 0;
};

//
// Bounded convex feasible set presented through its linear minimization
// oracle. When the set is a polytope the atom list (extreme points) is
// exposed; LMO answers are always atoms. Ties break to the smallest index
// so that runs are reproducible.
//
class AtomicDomain {
 public:
  static constexpr double kFeasTol = 1e-9;  // absolute, per constraint

  explicit AtomicDomain(int dimension) : dim_(dimension) {
    if (dimension <= 0) throw std::invalid_argument("domain dimension must be positive");
  }
  virtual ~AtomicDomain() = default;

  int dimension() const { return dim_; }

  // argmin over the domain of <g, .>; counts one LMO call.
  Vector lmo(const Vector& g) const {
    check_dim(g);
    ++lmo_calls_;
    return atom(lmo_index_impl(g));
  }
  // Atom-index form of the LMO; used by the O(n) inner-loop fast path.
  int lmo_index(const Vector& g) const {
    check_dim(g);
    ++lmo_calls_;
    return lmo_index_impl(g);
  }

  virtual int num_atoms() const = 0;
  virtual Vector atom(int j) const = 0;
  virtual bool contains(const Vector& x, double tol = kFeasTol) const = 0;

  // True for the standard simplex; enables the Hessian-column fast path.
  virtual bool is_standard_simplex() const { return false; }

  long lmo_calls() const { return lmo_calls_.load(); }
  void reset_lmo_calls() const { lmo_calls_.store(0); }

 protected:
  virtual int lmo_index_impl(const Vector& g) const = 0;
  void check_dim(const Vector& g) const {
    if (g.size() != dim_) throw DimensionMismatch("dual vector dimension mismatch");
  }

 private:
  int dim_;
  mutable std::atomic<long> lmo_calls_{0};
};

// Standard simplex S_n = conv{e_1, ..., e_n}.
class SimplexDomain final : public AtomicDomain {
 public:
  explicit SimplexDomain(int n) : AtomicDomain(n) {}
  int num_atoms() const override { return dimension(); }
  Vector atom(int j) const override;
  bool contains(const Vector& x, double tol = kFeasTol) const override;
  bool is_standard_simplex() const override { return true; }

 protected:
  int lmo_index_impl(const Vector& g) const override;
};

// Convex hull of an explicit atom list. Membership is decided through
// barycentric coordinates (least squares over the atoms), which is exact
// for affinely independent atom sets such as affine images of a simplex.
class PolytopeDomain final : public AtomicDomain {
 public:
  explicit PolytopeDomain(std::vector<Vector> atoms);
  int num_atoms() const override { return static_cast<int>(atoms_.size()); }
  Vector atom(int j) const override { return atoms_.at(j); }
  bool contains(const Vector& x, double tol = kFeasTol) const override;

 protected:
  int lmo_index_impl(const Vector& g) const override;

 private:
  std::vector<Vector> atoms_;
  Eigen::ColPivHouseholderQR<Matrix> bary_qr_;  // [atoms; 1^T] for membership
};

//
// Evaluator bundle for the smooth part f: value, gradient, Hessian and
// Hessian-vector products, with thread-safe call counters. Derived classes
// implement the *_impl hooks.
//
class SmoothOracle {
 public:
  explicit SmoothOracle(int dimension) : dim_(dimension) {}
  virtual ~SmoothOracle() = default;

  int dimension() const { return dim_; }

  double value(const Vector& x) const {
    check_dim(x);
    ++n_value_;
    return value_impl(x);
  }
  Vector gradient(const Vector& x) const {
    check_dim(x);
    ++n_grad_;
    return gradient_impl(x);
  }
  Matrix hessian(const Vector& x) const {
    check_dim(x);
    ++n_hess_;
    return hessian_impl(x);
  }
  Vector hessian_vec(const Vector& x, const Vector& h) const {
    check_dim(x);
    check_dim(h);
    ++n_hess_vec_;
    return hessian_vec_impl(x, h);
  }

  virtual bool has_third_directional() const { return false; }
  // D^3 f(x)[h]^3
  virtual double third_directional(const Vector&, const Vector&) const {
    throw std::logic_error("third directional derivative not available");
  }

  OracleCounts counts() const {
    return {n_value_.load(), n_grad_.load(), n_hess_.load(), n_hess_vec_.load()};
  }
  void reset_counters() const {
    n_value_ = 0;
    n_grad_ = 0;
    n_hess_ = 0;
    n_hess_vec_ = 0;
  }

 protected:
  virtual double value_impl(const Vector& x) const = 0;
  virtual Vector gradient_impl(const Vector& x) const = 0;
  virtual Matrix hessian_impl(const Vector& x) const = 0;
  virtual Vector hessian_vec_impl(const Vector& x, const Vector& h) const {
    return hessian_impl(x) * h;
  }
  void check_dim(const Vector& x) const {
    if (x.size() != dim_) throw DimensionMismatch("point dimension mismatch");
  }

 private:
  int dim_;
  mutable std::atomic<long> n_value_{0}, n_grad_{0}, n_hess_{0}, n_hess_vec_{0};
};

//
// Composite problem F = f + psi with psi the {0,+inf} indicator of the
// domain. The psi/composite_lmo virtuals are the extension point for a
// general simple composite part; v1 only instantiates indicators.
//
class CompositeProblem {
 public:
  CompositeProblem(std::shared_ptr<const SmoothOracle> smooth,
                   std::shared_ptr<const AtomicDomain> domain)
      : smooth_(std::move(smooth)), domain_(std::move(domain)) {
    if (!smooth_ || !domain_) throw std::invalid_argument("null problem component");
    if (smooth_->dimension() != domain_->dimension())
      throw DimensionMismatch("oracle/domain dimension mismatch");
  }
  virtual ~CompositeProblem() = default;

  const SmoothOracle& smooth() const { return *smooth_; }
  const AtomicDomain& domain() const { return *domain_; }
  int dimension() const { return domain_->dimension(); }

  virtual double psi(const Vector& x) const { return domain_->contains(x) ? 0.0 : kInf; }
  double composite_value(const Vector& x) const { return smooth_->value(x) + psi(x); }
  // argmin over dom psi of <g, v> + psi(v); for an indicator this is the LMO.
  virtual Vector composite_lmo(const Vector& g) const { return domain_->lmo(g); }

 private:
  std::shared_ptr<const SmoothOracle> smooth_;
  std::shared_ptr<const AtomicDomain> domain_;
};

//
// Contraction schedule gamma_k = (p+1)/(k+p+1), induced by the weight
// sequence A_k = k(k+1)...(k+p), a_k = A_k - A_{k-1}.
//
class Schedule {
 public:
  explicit Schedule(int order_p) : p_(order_p) {
    if (order_p < 1) throw std::invalid_argument("schedule order must be >= 1");
  }
  int order() const { return p_; }

  double gamma(long k) const {
    if (k < 0) throw std::invalid_argument("iteration index must be >= 0");
    return static_cast<double>(p_ + 1) / static_cast<double>(k + p_ + 1);
  }
  // A_k = k(k+1)...(k+p) in exact integer arithmetic.
  long long A(long k) const {
    long long r = 1;
    for (int i = 0; i <= p_; ++i) r *= (k + i);
    return r;
  }
  long long a(long k) const { return A(k) - A(k - 1); }

 private:
  int p_;
};

// Step 3 of every scheme: accept the candidate iff it does not increase F.
inline bool step_accept(double F_bar, double F_cur) {
  if (!std::isfinite(F_bar) || !std::isfinite(F_cur))
    throw std::invalid_argument("step_accept requires finite values");
  return F_bar <= F_cur;
}

// Per-iteration record of a run. `ell`/`lower_bound` are NaN when the
// certificate is not computed.
struct IterRecord {
  long k = 0;
  double F = kNaN;
  double ell = kNaN;
  double lower_bound = kNaN;
  long grad_calls = 0;
  long hess_calls = 0;
  long lmo_calls = 0;
  long inner_iters = 0;
  double wall_ms = 0.0;
  bool accepted = true;
  bool inner_cap_hit = false;
};

struct RunTrace {
  std::vector<IterRecord> iters;
  bool aborted = false;        // with the propagate cap policy, set on early stop
  std::string abort_reason;

  bool monotone() const {
    for (size_t i = 1; i < iters.size(); ++i)
      if (iters[i].F > iters[i - 1].F) return false;
    return true;
  }
  double final_F() const { return iters.empty() ? kNaN : iters.back().F; }
  // Best certified lower bound on F* seen anywhere in the trace.
  double best_lower() const {
    double b = -kInf;
    for (const auto& r : iters)
      if (std::isfinite(r.lower_bound)) b = std::max(b, r.lower_bound);
    return b;
  }
};

}  // namespace cpm
