#pragma once

// Episode simulation: drives the coupled system over one sliced gait window,
// evaluating human attachment states, interaction wrenches, lock torques and
// the actuation policy at every integrator stage, and records the trace from
// which all metrics and the optimization cost derive.

#include <array>
#include <memory>
#include <string>

#include "exosim/dynamics.hpp"
#include "exosim/harness.hpp"
#include "exosim/human.hpp"
#include "exosim/model.hpp"

namespace exosim {

enum class ActuationPolicy {
  Zero,                 // tau = 0
  GravityCompensation,  // tau = g(q) on the actuated DoFs (hip, knee)
};

struct EpisodeSpec {
  std::shared_ptr<const ExoskeletonModel> exo;
  std::shared_ptr<const HumanModel> human;
  HarnessConfig harness;
  std::array<ImpedanceParams, kNumInterfaces> impedance;  // six optimized + fixed pelvis
  ActuationPolicy actuation = ActuationPolicy::GravityCompensation;
  GaitTrajectory gait;  // full cycle; sliced by `window` inside run_episode
  EpisodeWindow window;
  double dt = 1e-3;
  IntegrationScheme scheme = IntegrationScheme::RungeKutta4;
  double transient_discard = 0.05;  // fraction of the episode dropped from metrics
  double snr_db = kNoNoise;         // noise on the human joint references
  double gamma = 0.0;               // initial-condition perturbation bound [rad | m]
  std::uint64_t seed = 0;           // root seed; noise/perturbation streams derived
  double stability_margin = 2.0;    // explicit-integration cap on lock gains
  bool clamp_exoskeleton = false;   // test-harness mode: hold the exoskeleton fixed
  Vec3 gravity = kDefaultGravity;

  void validate() const;
};

struct SimulationTrace {
  VecX times;
  MatX exo_q, exo_qdot;   // n x T
  MatX tau;               // n x T
  MatX human_channels;    // kGaitChannels x T
  std::array<MatX, kNumInterfaces> wrench;    // 6 x T, [torque; force], attachment frame
  std::array<MatX, kNumInterfaces> distance;  // 3 x T, |translational mismatch| components
  VecX power_interaction;  // per-sample power delivered to the exoskeleton
  VecX power_actuation;
  VecX power_lock;         // power extracted by the lock elements
  VecX lock_energy;        // lock spring potential per sample

  std::array<bool, kNumOptimizedInterfaces> interface_active{};  // false when detached
  std::array<std::pair<int, int>, 6> anatomical_pairs{};  // (exo DoF, gait channel)
  double dt = 0.0;
  double transient_discard = 0.0;
  bool divergent = false;
  double truncation_time = 0.0;
  int tie_break_events = 0;

  int sample_count() const { return static_cast<int>(times.size()); }
  /// First sample index retained by metrics (startup transient discarded).
  int retained_start() const;
};

SimulationTrace run_episode(const EpisodeSpec& spec);

/// Per-interface, per-component RMS over the retained window.
std::array<Vec6, kNumInterfaces> wrench_rms(const SimulationTrace& trace);

struct TrackingStats {
  double median = 0.0, q1 = 0.0, q3 = 0.0, min = 0.0, max = 0.0;
};

/// Statistics of (exo joint - human joint) for the six anatomical joints,
/// order hip_r, knee_r, ankle_r, hip_l, knee_l, ankle_l.
std::array<TrackingStats, 6> tracking_differences(const SimulationTrace& trace);

/// Counts (instant, component) threshold violations over the retained window:
/// violation <=> D_sim(j) - D_th(j) >= 0. Detached interfaces are excluded.
/// d_th has one entry per translational component of the six optimized
/// interfaces (18 values).
int constraint_value(const SimulationTrace& trace, const VecX& d_th);
VecX uniform_threshold(double d_th_meters);

/// Time-average of the weighted squared wrench components (the transparency
/// cost); w_weights has 36 entries, six per optimized interface.
double episode_cost(const SimulationTrace& trace, const VecX& w_weights);

struct EpisodeMetrics {
  std::array<Vec6, kNumInterfaces> rms;
  std::array<TrackingStats, 6> tracking;
  int constraint_violations = 0;
  double cost = 0.0;
  bool feasible = false;
  bool divergent = false;
};

EpisodeMetrics compute_metrics(const SimulationTrace& trace, const VecX& w_weights, const VecX& d_th);

// Trace export: CSV with documented column order, and a compact binary format
// for optimizer restarts, keyed by the spec fingerprint.
void save_trace_csv(const SimulationTrace& trace, const std::string& path);
void save_trace_binary(const SimulationTrace& trace, const std::string& path);
SimulationTrace load_trace_binary(const std::string& path);

/// Stable hash of everything that determines a trace (model, harness,
/// impedances, gait, seeds, integration settings).
std::uint64_t spec_fingerprint(const EpisodeSpec& spec);

}  // namespace exosim
