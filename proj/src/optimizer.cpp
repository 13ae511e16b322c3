#include "exosim/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "exosim/random.hpp"

namespace exosim {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Problem layout
// ---------------------------------------------------------------------------

std::vector<int> OptimizationProblem::active_blocks() const {
  std::vector<int> blocks;
  if (tie_legs) {
    for (int t = 0; t < 3; ++t)
      if (!episode.harness.detached(t)) blocks.push_back(t);
  } else {
    for (int i = 0; i < kNumOptimizedInterfaces; ++i)
      if (!episode.harness.detached_interface(i)) blocks.push_back(i);
  }
  return blocks;
}

int OptimizationProblem::dimension() const { return 12 * static_cast<int>(active_blocks().size()); }

VecX OptimizationProblem::lower_bounds() const { return VecX::Zero(dimension()); }

VecX OptimizationProblem::upper_bounds() const {
  const int nb = static_cast<int>(active_blocks().size());
  VecX up(12 * nb);
  for (int b = 0; b < nb; ++b) {
    up.segment<3>(12 * b + 0).setConstant(k_rot_upper);
    up.segment<3>(12 * b + 3).setConstant(k_trans_upper);
    up.segment<3>(12 * b + 6).setConstant(d_rot_upper);
    up.segment<3>(12 * b + 9).setConstant(d_trans_upper);
  }
  return up;
}

std::vector<std::string> OptimizationProblem::variable_names() const {
  static const std::array<std::string, 12> comp = {"k_rx", "k_ry", "k_rz", "k_tx", "k_ty", "k_tz",
                                                   "d_rx", "d_ry", "d_rz", "d_tx", "d_ty", "d_tz"};
  static const std::array<std::string, 3> type_names = {"thigh", "shank", "foot"};
  std::vector<std::string> names;
  for (int b : active_blocks()) {
    const std::string prefix = tie_legs ? type_names[b] : kInterfaceNames[b];
    for (const auto& c : comp) names.push_back(prefix + "_" + c);
  }
  return names;
}

VecX OptimizationProblem::anchor() const {
  const int nb = static_cast<int>(active_blocks().size());
  VecX x(12 * nb);
  for (int b = 0; b < nb; ++b) {
    x.segment<3>(12 * b + 0).setConstant(0.25 * k_rot_upper);
    x.segment<3>(12 * b + 3).setConstant(0.25 * k_trans_upper);
    x.segment<3>(12 * b + 6).setConstant(0.35 * d_rot_upper);
    x.segment<3>(12 * b + 9).setConstant(0.35 * d_trans_upper);
  }
  return x;
}

std::array<ImpedanceParams, kNumInterfaces> OptimizationProblem::impedances_from(const VecX& x) const {
  if (x.size() != dimension())
    throw std::invalid_argument("impedances_from: variable vector has wrong dimension");
  const auto blocks = active_blocks();
  std::array<ImpedanceParams, kNumInterfaces> out;
  out[kPelvis] = episode.impedance[kPelvis];
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) {
    if (episode.harness.detached_interface(i)) {
      out[i] = ImpedanceParams{};  // not connected: exactly zero
      continue;
    }
    const int key = tie_legs ? interface_type(i) : i;
    const auto it = std::find(blocks.begin(), blocks.end(), key);
    if (it == blocks.end()) throw std::logic_error("impedances_from: missing block");
    const int pos = static_cast<int>(it - blocks.begin());
    out[i] = ImpedanceParams::from_flat(x.segment<12>(12 * pos));
  }
  return out;
}

OptimizationProblem OptimizationProblem::make(EpisodeSpec episode) {
  episode.validate();
  OptimizationProblem p;
  p.episode = std::move(episode);

  // Endpoint inertias from the inertia-matrix diagonal at home: translational
  // DoFs reflect the cuff mass, rotational DoFs the cuff rotational inertia.
  const KinematicTree& tree = p.episode.exo->tree;
  const MatX B0 = mass_matrix(tree, VecX::Zero(tree.dof_count()));
  double m_eff = std::numeric_limits<double>::max();
  double i_eff = std::numeric_limits<double>::max();
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) {
    const auto& dofs = p.episode.exo->interfaces[i].harness_dof;
    for (int d = 0; d < 3; ++d) m_eff = std::min(m_eff, B0(dofs[d], dofs[d]));
    for (int d = 3; d < 6; ++d) i_eff = std::min(i_eff, B0(dofs[d], dofs[d]));
  }

  // Interface bounds take their share of the explicit stability budget; the
  // lock gains take the rest (see HarnessConfig::lock_params).
  const double dt = p.episode.dt;
  const double margin = p.episode.stability_margin;
  p.k_trans_upper =
      std::min(p.k_trans_upper, kInterfaceShare * stable_stiffness_limit(m_eff, dt, margin));
  p.k_rot_upper =
      std::min(p.k_rot_upper, kInterfaceShare * stable_stiffness_limit(i_eff, dt, margin));
  p.d_trans_upper =
      std::min(2.0 * std::sqrt(p.k_trans_upper * m_eff), kInterfaceShare * margin * m_eff / dt);
  p.d_rot_upper =
      std::min(2.0 * std::sqrt(p.k_rot_upper * i_eff), kInterfaceShare * margin * i_eff / dt);
  return p;
}

void OptimizationProblem::validate() const {
  if (w_weights.size() != 6 * kNumOptimizedInterfaces)
    throw std::invalid_argument("problem: w_weights must have 36 entries");
  if ((w_weights.array() < 0.0).any())
    throw std::invalid_argument("problem: w_weights must be >= 0");
  if (d_th.size() != 3 * kNumOptimizedInterfaces)
    throw std::invalid_argument("problem: d_th must have 18 entries");
  if (!(k_rot_upper > 0.0) || !(k_trans_upper > 0.0) || !(d_rot_upper > 0.0) ||
      !(d_trans_upper > 0.0))
    throw std::invalid_argument("problem: variable upper bounds must be > 0 (call make())");
  episode.validate();
}

// ---------------------------------------------------------------------------
// Simulation objective
// ---------------------------------------------------------------------------

namespace {

std::uint64_t hash_vector(const VecX& x) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  const std::int64_t n = x.size();
  mix(&n, sizeof(n));
  mix(x.data(), sizeof(double) * x.size());
  return h;
}

}  // namespace

SimulationObjective::SimulationObjective(const OptimizationProblem& problem) : problem_(problem) {
  problem_.validate();
  spec_hash_ = spec_fingerprint(problem_.episode);
}

EvalResult SimulationObjective::evaluate(const VecX& x) {
  if (x.size() != problem_.dimension())
    throw std::invalid_argument("evaluate: variable vector has wrong dimension");

  VecX clamped = x.cwiseMax(problem_.lower_bounds()).cwiseMin(problem_.upper_bounds());
  const bool was_clamped = (clamped - x).cwiseAbs().maxCoeff() > 0.0;
  const std::uint64_t key = hash_vector(clamped);

  {
    std::lock_guard<std::mutex> lk(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) {
      EvalResult r = it->second;
      r.cached = true;
      r.clamped = was_clamped;
      return r;
    }
  }

  EpisodeSpec spec = problem_.episode;
  spec.impedance = problem_.impedances_from(clamped);
  const SimulationTrace trace = run_episode(spec);

  EvalResult r;
  r.divergent = trace.divergent;
  r.clamped = was_clamped;
  if (trace.divergent) {
    r.lambda = std::numeric_limits<double>::infinity();
    r.c = std::numeric_limits<int>::max();
  } else {
    r.lambda = episode_cost(trace, problem_.w_weights);
    r.c = constraint_value(trace, problem_.d_th);
  }

  std::lock_guard<std::mutex> lk(mutex_);
  cache_.emplace(key, r);
  return r;
}

int SimulationObjective::unique_evaluations() const {
  std::lock_guard<std::mutex> lk(mutex_);
  return static_cast<int>(cache_.size());
}

namespace {
constexpr char kCacheMagic[8] = {'E', 'X', 'O', 'C', 'A', 'C', 'H', '1'};
}

void SimulationObjective::save_cache(const std::string& path) const {
  std::lock_guard<std::mutex> lk(mutex_);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_cache: cannot open '" + path + "'");
  out.write(kCacheMagic, sizeof(kCacheMagic));
  out.write(reinterpret_cast<const char*>(&spec_hash_), sizeof(spec_hash_));
  for (const auto& [key, r] : cache_) {
    out.write(reinterpret_cast<const char*>(&key), sizeof(key));
    out.write(reinterpret_cast<const char*>(&r.lambda), sizeof(r.lambda));
    const std::int32_t c = r.c;
    out.write(reinterpret_cast<const char*>(&c), sizeof(c));
    const std::uint8_t div = r.divergent ? 1 : 0;
    out.write(reinterpret_cast<const char*>(&div), sizeof(div));
  }
}

int SimulationObjective::load_cache(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return 0;
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kCacheMagic, sizeof(magic)) != 0) return 0;
  std::uint64_t hash = 0;
  in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
  if (!in || hash != spec_hash_) return 0;  // cache from a different spec

  std::lock_guard<std::mutex> lk(mutex_);
  int loaded = 0;
  while (true) {
    std::uint64_t key;
    double lambda;
    std::int32_t c;
    std::uint8_t div;
    in.read(reinterpret_cast<char*>(&key), sizeof(key));
    if (!in) break;
    in.read(reinterpret_cast<char*>(&lambda), sizeof(lambda));
    in.read(reinterpret_cast<char*>(&c), sizeof(c));
    in.read(reinterpret_cast<char*>(&div), sizeof(div));
    if (!in) break;
    EvalResult r;
    r.lambda = lambda;
    r.c = c;
    r.divergent = div != 0;
    cache_.emplace(key, r);
    ++loaded;
  }
  return loaded;
}

// ---------------------------------------------------------------------------
// Nelder-Mead multistart
// ---------------------------------------------------------------------------

namespace {

struct StartOutcome {
  StartRecord record;
  std::vector<EvalLogEntry> log;
};

struct PenalizedEvaluator {
  Objective* obj = nullptr;
  double rho = 1.0;
  VecX lo, hi;
  int budget = 0;
  int start_index = 0;
  int used = 0;
  std::vector<EvalLogEntry> log;

  // Best-so-far within this start, lexicographic (feasible first, then lambda).
  bool has_best = false;
  VecX best_x;
  EvalResult best;

  bool exhausted() const { return used >= budget; }

  double operator()(const VecX& x_raw) {
    VecX x = x_raw.cwiseMax(lo).cwiseMin(hi);
    const EvalResult r = obj->evaluate(x);
    const double f = r.divergent ? std::numeric_limits<double>::infinity()
                                 : r.lambda + rho * static_cast<double>(r.c);
    EvalLogEntry e;
    e.start = start_index;
    e.index = used;
    e.lambda = r.lambda;
    e.c = r.c;
    e.penalized = f;
    e.cached = r.cached;
    e.clamped = r.clamped;
    e.x = x;
    log.push_back(std::move(e));
    ++used;

    const bool better = !has_best ||
                        std::make_pair(r.divergent ? 1 : 0, std::make_pair(r.c, r.lambda)) <
                            std::make_pair(best.divergent ? 1 : 0, std::make_pair(best.c, best.lambda));
    if (better) {
      has_best = true;
      best_x = x;
      best = r;
    }
    return f;
  }
};

StartOutcome run_start(Objective& obj, const VecX& x0, const VecX& lo, const VecX& hi, double rho,
                       int budget, int start_index, double tol_f, double tol_x) {
  const int n = static_cast<int>(x0.size());
  PenalizedEvaluator ev;
  ev.obj = &obj;
  ev.rho = rho;
  ev.lo = lo;
  ev.hi = hi;
  ev.budget = budget;
  ev.start_index = start_index;

  StartOutcome out;
  out.record.start_point = x0;

  // Adaptive Nelder-Mead (dimension-scaled coefficients) with bound
  // projection and shrinking restarts until the budget runs out.
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma_c = 0.75 - 0.5 / n;
  const double delta = 1.0 - 1.0 / n;

  double h_rel = 0.05;
  int iterations = 0;
  VecX center = x0;

  while (!ev.exhausted() && h_rel > 1e-11) {
    // Build a simplex around the current center.
    std::vector<VecX> xs;
    std::vector<double> fs;
    xs.push_back(center);
    fs.push_back(ev(center));
    for (int i = 0; i < n && !ev.exhausted(); ++i) {
      VecX v = center;
      double h = h_rel * (hi[i] - lo[i]);
      if (h <= 0.0) h = h_rel;
      if (v[i] + h > hi[i]) h = -h;
      v[i] += h;
      xs.push_back(v);
      fs.push_back(ev(v));
    }
    if (static_cast<int>(xs.size()) < n + 1) break;  // budget too small for a simplex

    std::vector<int> order(n + 1);
    for (int i = 0; i <= n; ++i) order[i] = i;
    auto sort_order = [&] {
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    };

    bool converged = false;
    while (!ev.exhausted() && !converged) {
      sort_order();
      const int ib = order[0], iw = order[n];

      double f_spread = 0.0, x_spread = 0.0;
      for (int i = 1; i <= n; ++i) {
        f_spread = std::max(f_spread, std::abs(fs[order[i]] - fs[ib]));
        x_spread = std::max(x_spread, (xs[order[i]] - xs[ib]).cwiseAbs().maxCoeff());
      }
      if (f_spread <= tol_f * (1.0 + std::abs(fs[ib])) && x_spread <= tol_x) {
        converged = true;
        break;
      }

      VecX centroid = VecX::Zero(n);
      for (int i = 0; i < n; ++i) centroid += xs[order[i]];
      centroid /= n;

      const VecX xr = centroid + alpha * (centroid - xs[iw]);
      const double fr = ev(xr);
      ++iterations;

      if (fr < fs[ib]) {
        if (ev.exhausted()) {
          xs[iw] = xr;
          fs[iw] = fr;
          break;
        }
        const VecX xe = centroid + beta * (xr - centroid);
        const double fe = ev(xe);
        if (fe < fr) {
          xs[iw] = xe;
          fs[iw] = fe;
        } else {
          xs[iw] = xr;
          fs[iw] = fr;
        }
      } else if (fr < fs[order[n - 1]]) {
        xs[iw] = xr;
        fs[iw] = fr;
      } else {
        const bool outside = fr < fs[iw];
        const VecX xc = outside ? VecX(centroid + gamma_c * (xr - centroid))
                                : VecX(centroid - gamma_c * (centroid - xs[iw]));
        if (ev.exhausted()) break;
        const double fc = ev(xc);
        if (fc < std::min(fr, fs[iw])) {
          xs[iw] = xc;
          fs[iw] = fc;
        } else {
          // Shrink toward the best vertex.
          for (int i = 1; i <= n && !ev.exhausted(); ++i) {
            const int idx = order[i];
            xs[idx] = xs[order[0]] + delta * (xs[idx] - xs[order[0]]);
            fs[idx] = ev(xs[idx]);
          }
        }
      }
    }

    sort_order();
    center = xs[order[0]];
    if (!converged) break;
    h_rel *= 0.3;  // restart tighter around the incumbent
  }

  out.record.iterations = iterations;
  out.record.evaluations = ev.used;
  if (ev.has_best) {
    out.record.best_x = ev.best_x;
    out.record.best_lambda = ev.best.lambda;
    out.record.best_c = ev.best.divergent ? std::numeric_limits<int>::max() : ev.best.c;
  } else {
    out.record.best_x = x0;
    out.record.best_lambda = std::numeric_limits<double>::infinity();
    out.record.best_c = std::numeric_limits<int>::max();
  }
  out.log = std::move(ev.log);
  return out;
}

}  // namespace

OptimizationResult solve(const OptimizationProblem& problem, Objective& objective,
                         const SolveOptions& options) {
  if (options.n_starts < 1) throw std::invalid_argument("solve: n_starts must be >= 1");
  if (options.budget < options.n_starts)
    throw std::invalid_argument("solve: budget must be >= n_starts");
  const int n = objective.dimension();
  if (n < 1) throw std::invalid_argument("solve: empty variable space");

  const VecX lo = problem.lower_bounds();
  const VecX hi = problem.upper_bounds();
  if (lo.size() != n || hi.size() != n)
    throw std::invalid_argument("solve: problem bounds do not match the objective dimension");

  // Start points: the stiff anchor plus log-uniform scatter samples.
  std::vector<VecX> starts;
  starts.push_back(problem.anchor().cwiseMax(lo).cwiseMin(hi));
  for (int s = 1; s < options.n_starts; ++s) {
    auto rng = make_rng(options.seed, "optimizer-start", s);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    VecX x(n);
    for (int i = 0; i < n; ++i) {
      const double floor_i = std::max(lo[i], hi[i] * 1e-4);
      x[i] = floor_i * std::pow(hi[i] / floor_i, uni(rng));
    }
    starts.push_back(x);
  }

  // Penalty scale: one anchor evaluation, so any constraint violation costs
  // more than the known-feasible point's objective.
  double rho = options.penalty_rho;
  if (rho <= 0.0) {
    const EvalResult anchor_eval = objective.evaluate(starts[0]);
    rho = 10.0 * std::max(1.0, anchor_eval.divergent ? 1.0 : anchor_eval.lambda);
  }

  const int per_start = std::max(1, options.budget / options.n_starts);
  int jobs = options.jobs > 0 ? options.jobs
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, options.n_starts);

  std::vector<StartOutcome> outcomes(options.n_starts);
  for (int wave = 0; wave < options.n_starts; wave += jobs) {
    const int count = std::min(jobs, options.n_starts - wave);
    std::vector<std::future<StartOutcome>> futures;
    futures.reserve(count);
    for (int k = 0; k < count; ++k) {
      const int s = wave + k;
      futures.push_back(std::async(std::launch::async, [&, s] {
        return run_start(objective, starts[s], lo, hi, rho, per_start, s, options.tol_f,
                         options.tol_x);
      }));
    }
    for (int k = 0; k < count; ++k) outcomes[wave + k] = futures[k].get();
  }

  OptimizationResult result;
  result.seed = options.seed;
  result.penalty_rho = rho;
  result.best_lambda = std::numeric_limits<double>::infinity();
  result.best_c = std::numeric_limits<int>::max();

  for (int s = 0; s < options.n_starts; ++s) {
    auto& oc = outcomes[s];
    result.total_evaluations += oc.record.evaluations;
    result.starts.push_back(oc.record);
    for (auto& e : oc.log) result.log.push_back(std::move(e));

    const auto& r = oc.record;
    const bool better = std::make_pair(r.best_c, r.best_lambda) <
                        std::make_pair(result.best_c, result.best_lambda);
    if (better) {
      result.best_x = r.best_x;
      result.best_lambda = r.best_lambda;
      result.best_c = r.best_c;
    }
  }
  result.feasible = result.best_c == 0;
  result.unique_evaluations = result.total_evaluations;
  if (auto* sim = dynamic_cast<SimulationObjective*>(&objective))
    result.unique_evaluations = sim->unique_evaluations();

  // Feasibility is re-checked without the penalty before reporting.
  if (result.feasible && result.best_x.size() == n) {
    const EvalResult verify = objective.evaluate(result.best_x);
    if (verify.c != 0 || verify.divergent) {
      result.feasible = false;
      result.best_c = verify.divergent ? std::numeric_limits<int>::max() : verify.c;
    }
  }
  return result;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

ProblemFileOverrides load_problem_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_problem_file: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_problem_file: '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.value("kind", "") != std::string("optimization_problem"))
    throw std::runtime_error("load_problem_file: '" + path + "' is not a problem file");
  ProblemFileOverrides p;
  p.solve.n_starts = j.value("n_starts", p.solve.n_starts);
  p.solve.budget = j.value("budget", p.solve.budget);
  p.solve.seed = j.value("seed", p.solve.seed);
  p.solve.jobs = j.value("jobs", p.solve.jobs);
  p.solve.tol_f = j.value("tol_f", p.solve.tol_f);
  p.solve.tol_x = j.value("tol_x", p.solve.tol_x);
  p.solve.penalty_rho = j.value("penalty_rho", p.solve.penalty_rho);
  p.tie_legs = j.value("tie_legs", p.tie_legs);
  p.d_th = j.value("d_th", p.d_th);
  p.k_rot_upper = j.value("k_rot_upper", p.k_rot_upper);
  p.k_trans_upper = j.value("k_trans_upper", p.k_trans_upper);
  if (j.contains("weights")) {
    const auto w = j["weights"].get<std::vector<double>>();
    if (w.size() != 36)
      throw std::runtime_error("load_problem_file: weights must have 36 entries");
    p.w_weights = Eigen::Map<const VecX>(w.data(), 36);
  }
  return p;
}

void save_problem_file(const ProblemFileOverrides& p, const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "optimization_problem";
  j["n_starts"] = p.solve.n_starts;
  j["budget"] = p.solve.budget;
  j["seed"] = p.solve.seed;
  j["jobs"] = p.solve.jobs;
  j["tol_f"] = p.solve.tol_f;
  j["tol_x"] = p.solve.tol_x;
  j["penalty_rho"] = p.solve.penalty_rho;
  j["tie_legs"] = p.tie_legs;
  j["d_th"] = p.d_th;
  j["k_rot_upper"] = p.k_rot_upper;
  j["k_trans_upper"] = p.k_trans_upper;
  if (p.w_weights.size() == 36)
    j["weights"] = std::vector<double>(p.w_weights.data(), p.w_weights.data() + 36);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_problem_file: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

void save_result_json(const OptimizationResult& result, const OptimizationProblem& problem,
                      const std::string& path) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "optimization_result";
  j["feasible"] = result.feasible;
  j["lambda"] = result.best_lambda;
  j["constraint_violations"] = result.best_c;
  j["penalty_rho"] = result.penalty_rho;
  j["seed"] = result.seed;
  j["total_evaluations"] = result.total_evaluations;
  j["unique_evaluations"] = result.unique_evaluations;
  j["tie_legs"] = problem.tie_legs;

  const auto names = problem.variable_names();
  json vars = json::object();
  for (size_t i = 0; i < names.size() && i < static_cast<size_t>(result.best_x.size()); ++i)
    vars[names[i]] = result.best_x[i];
  j["variables"] = vars;
  j["variable_order"] = names;
  j["best_x"] = std::vector<double>(result.best_x.data(), result.best_x.data() + result.best_x.size());

  json starts = json::array();
  for (const auto& s : result.starts) {
    starts.push_back(json{
        {"lambda", s.best_lambda},
        {"constraint_violations", s.best_c},
        {"evaluations", s.evaluations},
        {"iterations", s.iterations},
        {"start_point", std::vector<double>(s.start_point.data(),
                                            s.start_point.data() + s.start_point.size())},
        {"best_x", std::vector<double>(s.best_x.data(), s.best_x.data() + s.best_x.size())}});
  }
  j["starts"] = starts;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_result_json: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

void save_eval_log_csv(const OptimizationResult& result, const OptimizationProblem& problem,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_eval_log_csv: cannot open '" + path + "'");
  out.precision(17);
  out << "start,index,cached,clamped,lambda,c,penalized";
  for (const auto& name : problem.variable_names()) out << "," << name;
  out << "\n";
  for (const auto& e : result.log) {
    out << e.start << "," << e.index << "," << (e.cached ? 1 : 0) << "," << (e.clamped ? 1 : 0)
        << "," << e.lambda << "," << e.c << "," << e.penalized;
    for (int i = 0; i < e.x.size(); ++i) out << "," << e.x[i];
    out << "\n";
  }
}

}  // namespace exosim
