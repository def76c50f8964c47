#pragma once

#include <iosfwd>
#include <random>

#include "cpm/core.hpp"
#include "cpm/methods.hpp"
#include "cpm/smoothness.hpp"

namespace cpm::bench {

// Portable uniform draws on [-1, 1): std::mt19937_64 seeded directly with
// the instance seed; each draw maps the top 53 bits of one 64-bit output
// through u = (x >> 11) * 2^-53, value = 2u - 1. Stream order for an
// instance: the m x n matrix A row-major, then the m entries of b.
class PortableUniform {
 public:
  explicit PortableUniform(unsigned long long seed) : rng_(seed) {}
  double next() {
    const double u = static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
    return 2.0 * u - 1.0;
  }

 private:
  std::mt19937_64 rng_;
};

struct SoftMaxInstance {
  Matrix A;  // m x n
  Vector b;  // m
  double mu = 0.1;
  unsigned long long seed = 0;
  int n() const { return static_cast<int>(A.cols()); }
  int m() const { return static_cast<int>(A.rows()); }
};

SoftMaxInstance generate_instance(int n, int m, double mu, unsigned long long seed);

// f_mu(x) = mu ln sum_i exp((<a_i, x> - b_i)/mu), evaluated with
// max-subtraction. Softmax weights pi give grad = A^T pi and
// hess = (A^T diag(pi) A - g g^T)/mu.
class SoftMaxOracle final : public SmoothOracle {
 public:
  explicit SoftMaxOracle(SoftMaxInstance inst);
  const SoftMaxInstance& instance() const { return inst_; }
  Vector softmax_weights(const Vector& x) const;

  bool has_third_directional() const override { return true; }
  double third_directional(const Vector& x, const Vector& h) const override;

 protected:
  double value_impl(const Vector& x) const override;
  Vector gradient_impl(const Vector& x) const override;
  Matrix hessian_impl(const Vector& x) const override;
  Vector hessian_vec_impl(const Vector& x, const Vector& h) const override;

 private:
  SoftMaxInstance inst_;
};

std::shared_ptr<CompositeProblem> make_softmax_problem(const SoftMaxInstance& inst);

struct ExperimentConfig {
  int n = 20;
  int m = 50;
  double mu = 0.1;
  unsigned long long seed = 0;
  std::vector<std::string> methods = {"fw", "icn"};  // subset of {fw, icn}
  double c = 1.0;
  long max_outer = 500;
  long inner_cap = 0;  // 0: automatic
  bool certificate = true;
  std::string out = "run";
  std::string format = "csv";  // csv | json
  bool record_wall_time = true;  // off: wall_ms column fixed to 0 for byte-stable output

  void validate() const;  // throws std::invalid_argument on bad settings
};

// One CSV (or JSON mirror) per method plus a summary JSON. Returns 0 on
// success and 3 when some method exhausted the inner cap in every
// iteration; cap hits are recorded per-iteration and the run continues.
int run_experiment(const ExperimentConfig& config);

// Run every config of a JSON array in parallel.
int run_sweep(const std::vector<ExperimentConfig>& configs, unsigned max_threads = 0);
std::vector<ExperimentConfig> parse_sweep_file(const std::string& path);

struct ReferenceBracket {
  double upper = kInf;   // best F seen over a long FW and a long ICN run
  double lower = -kInf;  // best certificate bound max_k phi_k*/A_k
};
ReferenceBracket reference_solution(const CompositeProblem& problem, long budget);

void write_trace_csv(std::ostream& os, const RunTrace& trace);
void write_trace_json(std::ostream& os, const RunTrace& trace);

// SmoothnessConstants report for a SoftMax instance (sampled estimators
// plus the closed-form log-sum-exp bounds), as a JSON string.
std::string smoothness_report(const SoftMaxInstance& inst, const SamplingPlan& plan = {});

}  // namespace cpm::bench
