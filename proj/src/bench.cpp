#include "cpm/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace cpm::bench {

using nlohmann::json;

SoftMaxInstance generate_instance(int n, int m, double mu, unsigned long long seed) {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  PortableUniform gen(seed);
  SoftMaxInstance inst;
  inst.A.resize(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inst.A(i, j) = gen.next();
  inst.b.resize(m);
  for (int i = 0; i < m; ++i) inst.b[i] = gen.next();
  inst.mu = mu;
  inst.seed = seed;
  return inst;
}

SoftMaxOracle::SoftMaxOracle(SoftMaxInstance inst)
    : SmoothOracle(static_cast<int>(inst.A.cols())), inst_(std::move(inst)) {}

Vector SoftMaxOracle::softmax_weights(const Vector& x) const {
  Vector s = (inst_.A * x - inst_.b) / inst_.mu;
  const double mx = s.maxCoeff();
  Vector e = (s.array() - mx).exp();
  return e / e.sum();
}

double SoftMaxOracle::value_impl(const Vector& x) const {
  Vector s = (inst_.A * x - inst_.b) / inst_.mu;
  const double mx = s.maxCoeff();
  return inst_.mu * (mx + std::log((s.array() - mx).exp().sum()));
}

Vector SoftMaxOracle::gradient_impl(const Vector& x) const {
  return inst_.A.transpose() * softmax_weights(x);
}

Matrix SoftMaxOracle::hessian_impl(const Vector& x) const {
  const Vector pi = softmax_weights(x);
  const Vector g = inst_.A.transpose() * pi;
  Matrix H = inst_.A.transpose() * pi.asDiagonal() * inst_.A;
  H.noalias() -= g * g.transpose();
  return H / inst_.mu;
}

Vector SoftMaxOracle::hessian_vec_impl(const Vector& x, const Vector& h) const {
  const Vector pi = softmax_weights(x);
  const Vector u = inst_.A * h;
  const Vector g = inst_.A.transpose() * pi;
  return (inst_.A.transpose() * pi.cwiseProduct(u) - g * (g.dot(h))) / inst_.mu;
}

double SoftMaxOracle::third_directional(const Vector& x, const Vector& h) const {
  const Vector pi = softmax_weights(x);
  const Vector u = inst_.A * h;
  const double m1 = pi.dot(u);
  const double m2 = pi.dot(u.cwiseProduct(u));
  const double m3 = pi.dot(u.cwiseProduct(u.cwiseProduct(u)));
  return (m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1) / (inst_.mu * inst_.mu);
}

std::shared_ptr<CompositeProblem> make_softmax_problem(const SoftMaxInstance& inst) {
  auto oracle = std::make_shared<SoftMaxOracle>(inst);
  auto domain = std::make_shared<SimplexDomain>(inst.n());
  return std::make_shared<CompositeProblem>(oracle, domain);
}

void ExperimentConfig::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("n and m must be >= 1");
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (methods.empty()) throw std::invalid_argument("select at least one method");
  for (const auto& mth : methods)
    if (mth != "fw" && mth != "icn")
      throw std::invalid_argument("unknown method '" + mth + "' (expected fw or icn)");
  if (std::find(methods.begin(), methods.end(), "icn") != methods.end() && !(c > 0.0))
    throw std::invalid_argument("icn requires c > 0");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
  if (inner_cap < 0) throw std::invalid_argument("inner_cap must be >= 0");
  if (format != "csv" && format != "json")
    throw std::invalid_argument("format must be csv or json");
  if (out.empty()) throw std::invalid_argument("output path must not be empty");
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_row(std::ostream& os, const IterRecord& r, bool wall) {
  os << r.k << ',' << fmt_double(r.F) << ',';
  if (std::isfinite(r.ell)) os << fmt_double(r.ell);
  os << ',';
  if (std::isfinite(r.lower_bound)) os << fmt_double(r.lower_bound);
  os << ',' << r.grad_calls << ',' << r.hess_calls << ',' << r.lmo_calls << ','
     << r.inner_iters << ',' << fmt_double(wall ? r.wall_ms : 0.0) << '\n';
}

json record_to_json(const IterRecord& r, bool wall) {
  json j;
  j["k"] = r.k;
  j["F"] = r.F;
  if (std::isfinite(r.ell)) j["ell"] = r.ell;
  if (std::isfinite(r.lower_bound)) j["lower_bound"] = r.lower_bound;
  j["grad_calls"] = r.grad_calls;
  j["hess_calls"] = r.hess_calls;
  j["lmo_calls"] = r.lmo_calls;
  j["inner_iters"] = r.inner_iters;
  j["wall_ms"] = wall ? r.wall_ms : 0.0;
  return j;
}

void write_trace(std::ostream& os, const RunTrace& trace, const std::string& format, bool wall) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& r : trace.iters) arr.push_back(record_to_json(r, wall));
    os << arr.dump(2) << '\n';
  } else {
    os << "k,F,ell,lower_bound,grad_calls,hess_calls,lmo_calls,inner_iters,wall_ms\n";
    for (const auto& r : trace.iters) write_row(os, r, wall);
  }
}

json config_echo(const ExperimentConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["m"] = cfg.m;
  j["mu"] = cfg.mu;
  j["seed"] = cfg.seed;
  j["methods"] = cfg.methods;
  j["c"] = cfg.c;
  j["max_outer"] = cfg.max_outer;
  j["inner_cap"] = cfg.inner_cap;
  j["certificate"] = cfg.certificate;
  j["out"] = cfg.out;
  j["format"] = cfg.format;
  return j;
}

}  // namespace

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  write_trace(os, trace, "csv", true);
}

void write_trace_json(std::ostream& os, const RunTrace& trace) {
  write_trace(os, trace, "json", true);
}

int run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const SoftMaxInstance inst = generate_instance(cfg.n, cfg.m, cfg.mu, cfg.seed);
  auto problem = make_softmax_problem(inst);

  json summary;
  summary["config"] = config_echo(cfg);
  int status = 0;

  for (const auto& method : cfg.methods) {
    RunTrace trace;
    if (method == "fw") {
      trace = frank_wolfe_run(*problem, cfg.max_outer, cfg.certificate);
    } else {
      IcnOptions opts;
      opts.c = cfg.c;
      opts.max_outer = cfg.max_outer;
      opts.inner_cap = cfg.inner_cap;
      opts.certificate = cfg.certificate;
      opts.cap_policy = IcnOptions::CapPolicy::skip_iteration;
      trace = icn_run(*problem, opts);
    }

    const std::string path = cfg.out + "_" + method + "." + cfg.format;
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open output file " + path);
    write_trace(os, trace, cfg.format, cfg.record_wall_time);

    long cap_hits = 0, steps = 0;
    for (const auto& r : trace.iters)
      if (r.k >= 1) {
        ++steps;
        if (r.inner_cap_hit) ++cap_hits;
      }
    if (method == "icn" && steps > 0 && cap_hits == steps) status = 3;

    json ms;
    ms["file"] = path;
    ms["final_F"] = trace.final_F();
    const double best_lower = trace.best_lower();
    if (std::isfinite(best_lower)) {
      ms["best_lower"] = best_lower;
      ms["final_residual_estimate"] = trace.final_F() - best_lower;
    }
    const long hi = std::max<long>(2, cfg.max_outer - 1);
    const long lo = std::max<long>(1, std::min<long>(20, hi / 2));
    const double slope = loglog_slope(trace, lo, hi);
    if (std::isfinite(slope)) ms["loglog_slope"] = slope;
    ms["inner_cap_hits"] = cap_hits;
    summary["methods"][method] = ms;
  }

  std::ofstream os(cfg.out + "_summary.json");
  os << summary.dump(2) << '\n';
  return status;
}

int run_sweep(const std::vector<ExperimentConfig>& configs, unsigned max_threads) {
  if (configs.empty()) return 0;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(max_threads ? max_threads : hw,
                                              static_cast<unsigned>(configs.size()));
  std::atomic<size_t> next{0};
  std::atomic<int> status{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= configs.size()) return;
        const int rc = run_experiment(configs[i]);
        int cur = status.load();
        while (rc > cur && !status.compare_exchange_weak(cur, rc)) {
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  return status.load();
}

std::vector<ExperimentConfig> parse_sweep_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open sweep config " + path);
  json arr = json::parse(is);
  if (!arr.is_array()) throw std::invalid_argument("sweep config must be a JSON array");
  std::vector<ExperimentConfig> configs;
  for (const auto& j : arr) {
    ExperimentConfig cfg;
    cfg.n = j.value("n", cfg.n);
    cfg.m = j.value("m", cfg.m);
    cfg.mu = j.value("mu", cfg.mu);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
    cfg.c = j.value("c", cfg.c);
    cfg.max_outer = j.value("max_outer", cfg.max_outer);
    cfg.inner_cap = j.value("inner_cap", cfg.inner_cap);
    cfg.certificate = j.value("certificate", cfg.certificate);
    cfg.out = j.value("out", cfg.out);
    cfg.format = j.value("format", cfg.format);
    cfg.record_wall_time = j.value("record_wall_time", cfg.record_wall_time);
    cfg.validate();
    configs.push_back(std::move(cfg));
  }
  return configs;
}

ReferenceBracket reference_solution(const CompositeProblem& problem, long budget) {
  if (budget < 10000) throw std::invalid_argument("reference budget must be >= 1e4");
  ReferenceBracket out;

  const RunTrace fw = frank_wolfe_run(problem, budget, /*certificate=*/true);
  out.upper = std::min(out.upper, fw.final_F());
  out.lower = std::max(out.lower, fw.best_lower());

  IcnOptions opts;
  opts.c = 1.0;
  opts.certificate = true;
  opts.max_outer = std::clamp<long>(budget / 20, 200, 4000);
  opts.cap_policy = IcnOptions::CapPolicy::skip_iteration;
  const RunTrace icn = icn_run(problem, opts);
  out.upper = std::min(out.upper, icn.final_F());
  out.lower = std::max(out.lower, icn.best_lower());
  return out;
}

std::string smoothness_report(const SoftMaxInstance& inst, const SamplingPlan& plan) {
  auto problem = make_softmax_problem(inst);

  json j;
  j["instance"] = {{"n", inst.n()}, {"m", inst.m()}, {"mu", inst.mu}, {"seed", inst.seed}};

  for (int p = 1; p <= 2; ++p) {
    SmoothnessConstants c;
    c.order_p = p;
    c.method = EstimationMethod::sampled;
    c.delta_p = estimate_delta(*problem, p, plan);
    c.gamma_p = estimate_gamma(*problem, p, plan);
    json jc;
    jc["delta_p"] = c.delta_p;
    jc["gamma_p"] = c.gamma_p;
    jc["method"] = "sampled";
    j["order"][std::to_string(p)] = jc;
  }

  std::vector<Vector> rows;
  rows.reserve(inst.m());
  for (int i = 0; i < inst.m(); ++i) rows.push_back(inst.A.row(i).transpose());
  const LogSumExpVarBound vb = var_logsumexp_simplex_bound(rows);
  j["logsumexp_bounds"] = {{"v2_mu1", vb.v2},
                           {"v3_mu1", vb.v3},
                           {"v2_scaled", vb.v2 / inst.mu},
                           {"v3_scaled", vb.v3 / (inst.mu * inst.mu)}};
  j["suggested_c"] = choose_c(vb.v2 / inst.mu, j["order"]["2"]["delta_p"].get<double>());
  return j.dump(2);
}

}  // namespace cpm::bench
