#pragma once

// Scenario resolution: turns a scenario config file (or programmatic
// defaults) into built models, a gait source and an episode template, and
// carries the fully resolved provenance block embedded in every output.

#include <memory>
#include <optional>
#include <string>

#include "exosim/optimizer.hpp"
#include "exosim/simulation.hpp"

namespace exosim {

struct ScenarioConfig {
  // Model source: a model file or a built-in percentile table.
  std::string model_file;      // empty = build from percentile
  std::string percentile = "p50";
  ExoBuildOptions build_options;

  // Gait source: exactly one of file | synthetic.
  std::string gait_file;  // empty = synthetic
  SyntheticGaitParams synthetic;

  // Harness layout: preset code or layout file.
  std::string harness_preset = "[0 1 0]";
  std::string harness_file;  // overrides the preset when set

  // Impedance source for plain simulation: "anchor" or "explicit".
  std::string impedance_mode = "anchor";
  std::array<ImpedanceParams, 3> explicit_impedance{};  // per interface type
  PelvisImpedance pelvis;

  EpisodeWindow window;
  double dt = 1e-3;
  double transient_discard = 0.05;
  double snr_db = kNoNoise;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::string actuation = "gravity_comp";  // or "zero"
  double stability_margin = 2.0;

  std::string out_dir = "out";

  void validate() const;
};

ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const ScenarioConfig& config, const std::string& path);

/// Everything a run needs, resolved once.
struct ResolvedScenario {
  std::shared_ptr<const ExoskeletonModel> exo;
  std::shared_ptr<const HumanModel> human;
  GaitTrajectory gait;
  HarnessConfig harness;
  ScenarioConfig config;

  /// Episode template with the scenario's impedance choice applied.
  EpisodeSpec episode() const;

  /// Resolved provenance (scenario + versions), embedded in output headers.
  std::string provenance_json() const;
};

ResolvedScenario resolve_scenario(const ScenarioConfig& config);

/// Anchor impedances for an episode spec (the optimizer's feasible stiff
/// start applied as explicit impedance values).
std::array<ImpedanceParams, kNumInterfaces> anchor_impedances(const EpisodeSpec& episode_template,
                                                              bool tie_legs = true);

inline constexpr const char* kExosimVersion = "0.1.0";

}  // namespace exosim
