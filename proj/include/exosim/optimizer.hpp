#pragma once

// Transparency optimization: minimizes the weighted squared interaction
// wrenches over the interface impedance parameters subject to the tracking
// constraint c(x) = 0, via multi-start Nelder-Mead with scatter-sampled
// starts, an exact penalty on the violation count, and a persistent
// evaluation cache.

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "exosim/simulation.hpp"

namespace exosim {

/// Variable layout: one 12-value block [k_rot xyz, k_trans xyz, d_rot xyz,
/// d_trans xyz] per optimized interface. With leg tying (default) blocks are
/// per interface type (thigh, shank, foot) and apply to both legs. Fully
/// freed ("not connected") interfaces carry no variables and get zero
/// impedance. The pelvis impedance is fixed and never enters the layout.
struct OptimizationProblem {
  EpisodeSpec episode;  // template; impedance[0..5] replaced per evaluation
  VecX w_weights = VecX::Ones(6 * kNumOptimizedInterfaces);
  VecX d_th = uniform_threshold(0.10);
  bool tie_legs = true;

  double k_rot_upper = 5e3;    // N*m/rad
  double k_trans_upper = 1e5;  // N/m
  double d_rot_upper = 0.0;    // resolved at construction (critical damping)
  double d_trans_upper = 0.0;

  int dimension() const;
  VecX lower_bounds() const;  // all zero
  VecX upper_bounds() const;
  std::vector<std::string> variable_names() const;

  /// The feasible stiff-and-damped start point.
  VecX anchor() const;

  std::array<ImpedanceParams, kNumInterfaces> impedances_from(const VecX& x) const;

  /// Blocks (interface types with tying, interfaces without) carrying variables.
  std::vector<int> active_blocks() const;

  /// Resolves damping bounds and applies the explicit-integration stability
  /// cap to the stiffness bounds, using the endpoint inertias of the model.
  static OptimizationProblem make(EpisodeSpec episode);

  void validate() const;
};

struct EvalResult {
  double lambda = 0.0;
  int c = 0;
  bool divergent = false;
  bool cached = false;   // served from the evaluation cache
  bool clamped = false;  // variables were projected into bounds
};

class Objective {
 public:
  virtual ~Objective() = default;
  virtual EvalResult evaluate(const VecX& x) = 0;
  virtual int dimension() const = 0;
};

/// Production objective: instantiates the impedances, runs one episode and
/// returns (cost, violation count). Out-of-bounds variables are clamped with
/// a warning recorded on the log entry. Evaluations are cached by variable
/// hash; the cache is thread-safe and can persist across runs.
class SimulationObjective : public Objective {
 public:
  explicit SimulationObjective(const OptimizationProblem& problem);

  EvalResult evaluate(const VecX& x) override;
  int dimension() const override { return problem_.dimension(); }

  int unique_evaluations() const;

  void save_cache(const std::string& path) const;
  int load_cache(const std::string& path);  // returns entries loaded; stale caches ignored

 private:
  OptimizationProblem problem_;
  std::uint64_t spec_hash_ = 0;
  mutable std::mutex mutex_;
  std::map<std::uint64_t, EvalResult> cache_;
};

/// Analytic convex quadratic with a known minimizer; the test hook that
/// replaces the simulation when exercising the solver itself.
class QuadraticSurrogate : public Objective {
 public:
  QuadraticSurrogate(const VecX& minimizer, const VecX& curvature)
      : minimizer_(minimizer), curvature_(curvature) {}

  EvalResult evaluate(const VecX& x) override {
    EvalResult r;
    r.lambda = (x - minimizer_).cwiseAbs2().dot(curvature_);
    return r;
  }
  int dimension() const override { return static_cast<int>(minimizer_.size()); }
  const VecX& minimizer() const { return minimizer_; }

 private:
  VecX minimizer_;
  VecX curvature_;
};

struct EvalLogEntry {
  int start = 0;
  int index = 0;
  double lambda = 0.0;
  int c = 0;
  double penalized = 0.0;
  bool cached = false;
  bool clamped = false;
  VecX x;
};

struct StartRecord {
  VecX start_point;
  VecX best_x;
  double best_lambda = 0.0;
  int best_c = 0;
  int evaluations = 0;
  int iterations = 0;
};

struct OptimizationResult {
  VecX best_x;
  double best_lambda = 0.0;
  int best_c = 0;
  bool feasible = false;
  double penalty_rho = 0.0;
  std::uint64_t seed = 0;
  int total_evaluations = 0;
  int unique_evaluations = 0;
  std::vector<StartRecord> starts;
  std::vector<EvalLogEntry> log;  // ordered by (start, eval index)
};

struct SolveOptions {
  int n_starts = 4;
  int budget = 2000;  // total requested evaluations across starts
  std::uint64_t seed = 0;
  int jobs = 0;  // 0 = hardware concurrency
  double tol_f = 1e-12;
  double tol_x = 1e-9;
  double penalty_rho = 0.0;  // 0 = auto-scale past the anchor's cost
};

/// Multi-start bound-constrained Nelder-Mead on lambda + rho * c. Start 0 is
/// the stiff anchor, the rest are log-uniform samples; fully seeded, results
/// independent of thread scheduling (reduction ordered by start index).
OptimizationResult solve(const OptimizationProblem& problem, Objective& objective,
                         const SolveOptions& options);

// Problem / result files.
struct ProblemFileOverrides {
  SolveOptions solve;
  bool tie_legs = true;
  VecX w_weights;  // empty = identity
  double d_th = 0.10;
  double k_rot_upper = 5e3;
  double k_trans_upper = 1e5;
};
ProblemFileOverrides load_problem_file(const std::string& path);
void save_problem_file(const ProblemFileOverrides& p, const std::string& path);

void save_result_json(const OptimizationResult& result, const OptimizationProblem& problem,
                      const std::string& path);
void save_eval_log_csv(const OptimizationResult& result, const OptimizationProblem& problem,
                       const std::string& path);

}  // namespace exosim
