#include "exosim/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace exosim {

using nlohmann::json;

void ScenarioConfig::validate() const {
  if (model_file.empty()) {
    anthropometrics_percentile(percentile);  // throws on unknown label
  } else if (!std::filesystem::exists(model_file)) {
    throw std::invalid_argument("scenario: model file '" + model_file + "' does not exist");
  }
  if (!gait_file.empty() && !std::filesystem::exists(gait_file))
    throw std::invalid_argument("scenario: gait file '" + gait_file + "' does not exist");
  if (!harness_file.empty() && !std::filesystem::exists(harness_file))
    throw std::invalid_argument("scenario: harness file '" + harness_file + "' does not exist");
  if (harness_file.empty() && !is_preset_code(harness_preset))
    throw std::invalid_argument("scenario: harness preset '" + harness_preset +
                                "' is not a built-in layout; provide a harness file");
  if (impedance_mode != "anchor" && impedance_mode != "explicit")
    throw std::invalid_argument("scenario: impedance mode must be 'anchor' or 'explicit'");
  if (actuation != "gravity_comp" && actuation != "zero")
    throw std::invalid_argument("scenario: actuation must be 'gravity_comp' or 'zero'");
  if (!(dt > 0.0)) throw std::invalid_argument("scenario: dt must be > 0");
  window.validate();
}

namespace {

json impedance_to_json(const ImpedanceParams& p) {
  auto arr = [](const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); };
  return json{{"k_rot", arr(p.k_rot)},
              {"k_trans", arr(p.k_trans)},
              {"d_rot", arr(p.d_rot)},
              {"d_trans", arr(p.d_trans)}};
}

ImpedanceParams impedance_from_json(const json& j) {
  auto vec = [&](const char* key) {
    const auto& a = j.at(key);
    return Vec3(a[0].get<double>(), a[1].get<double>(), a[2].get<double>());
  };
  ImpedanceParams p;
  p.k_rot = vec("k_rot");
  p.k_trans = vec("k_trans");
  p.d_rot = vec("d_rot");
  p.d_trans = vec("d_trans");
  p.validate();
  return p;
}

}  // namespace

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_scenario: '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.value("kind", "") != std::string("scenario"))
    throw std::runtime_error("load_scenario: '" + path + "' is not a scenario file");

  ScenarioConfig c;
  if (j.contains("model")) {
    const json& m = j["model"];
    c.model_file = m.value("file", "");
    c.percentile = m.value("percentile", c.percentile);
    c.build_options.total_mass = m.value("total_mass", c.build_options.total_mass);
    c.build_options.cuff_mass = m.value("cuff_mass", c.build_options.cuff_mass);
    c.build_options.lateral_offset = m.value("lateral_offset", c.build_options.lateral_offset);
  }
  if (j.contains("gait")) {
    const json& g = j["gait"];
    c.gait_file = g.value("file", "");
    if (g.contains("synthetic")) {
      const json& s = g["synthetic"];
      c.synthetic.cadence = s.value("cadence", c.synthetic.cadence);
      c.synthetic.amplitude = s.value("amplitude", c.synthetic.amplitude);
      c.synthetic.sagittal_scale = s.value("sagittal_scale", c.synthetic.sagittal_scale);
      c.synthetic.coronal_scale = s.value("coronal_scale", c.synthetic.coronal_scale);
      c.synthetic.cycles = s.value("cycles", c.synthetic.cycles);
      c.synthetic.sample_rate = s.value("sample_rate", c.synthetic.sample_rate);
    }
    if (!c.gait_file.empty() && g.contains("synthetic"))
      throw std::runtime_error("load_scenario: specify exactly one gait source (file or synthetic)");
  }
  if (j.contains("harness")) {
    c.harness_preset = j["harness"].value("preset", c.harness_preset);
    c.harness_file = j["harness"].value("file", "");
  }
  if (j.contains("impedance")) {
    const json& imp = j["impedance"];
    c.impedance_mode = imp.value("mode", c.impedance_mode);
    if (imp.contains("thigh")) c.explicit_impedance[0] = impedance_from_json(imp["thigh"]);
    if (imp.contains("shank")) c.explicit_impedance[1] = impedance_from_json(imp["shank"]);
    if (imp.contains("foot")) c.explicit_impedance[2] = impedance_from_json(imp["foot"]);
    if (imp.contains("pelvis")) {
      c.pelvis.k_trans = imp["pelvis"].value("k_trans", c.pelvis.k_trans);
      c.pelvis.k_rot = imp["pelvis"].value("k_rot", c.pelvis.k_rot);
    }
  }
  if (j.contains("window")) {
    const json& w = j["window"];
    if (w.contains("stance")) {
      c.window.stance_start = w["stance"][0].get<double>();
      c.window.stance_end = w["stance"][1].get<double>();
    }
    if (w.contains("swing")) {
      c.window.swing_start = w["swing"][0].get<double>();
      c.window.swing_end = w["swing"][1].get<double>();
    }
  }
  c.dt = j.value("dt", c.dt);
  c.transient_discard = j.value("transient_discard", c.transient_discard);
  if (j.contains("snr_db") && !j["snr_db"].is_null()) c.snr_db = j["snr_db"].get<double>();
  c.gamma = j.value("gamma", c.gamma);
  c.seed = j.value("seed", c.seed);
  c.actuation = j.value("actuation", c.actuation);
  c.stability_margin = j.value("stability_margin", c.stability_margin);
  c.out_dir = j.value("out_dir", c.out_dir);
  c.validate();
  return c;
}

namespace {

json scenario_to_json(const ScenarioConfig& c) {
  json j;
  j["format_version"] = 1;
  j["kind"] = "scenario";
  json model;
  if (!c.model_file.empty()) model["file"] = c.model_file;
  model["percentile"] = c.percentile;
  model["total_mass"] = c.build_options.total_mass;
  model["cuff_mass"] = c.build_options.cuff_mass;
  model["lateral_offset"] = c.build_options.lateral_offset;
  j["model"] = model;

  json gait;
  if (!c.gait_file.empty()) {
    gait["file"] = c.gait_file;
  } else {
    gait["synthetic"] = json{{"cadence", c.synthetic.cadence},
                             {"amplitude", c.synthetic.amplitude},
                             {"sagittal_scale", c.synthetic.sagittal_scale},
                             {"coronal_scale", c.synthetic.coronal_scale},
                             {"cycles", c.synthetic.cycles},
                             {"sample_rate", c.synthetic.sample_rate}};
  }
  j["gait"] = gait;

  json harness;
  if (!c.harness_file.empty())
    harness["file"] = c.harness_file;
  else
    harness["preset"] = c.harness_preset;
  j["harness"] = harness;

  json imp;
  imp["mode"] = c.impedance_mode;
  if (c.impedance_mode == "explicit") {
    imp["thigh"] = impedance_to_json(c.explicit_impedance[0]);
    imp["shank"] = impedance_to_json(c.explicit_impedance[1]);
    imp["foot"] = impedance_to_json(c.explicit_impedance[2]);
  }
  imp["pelvis"] = json{{"k_trans", c.pelvis.k_trans}, {"k_rot", c.pelvis.k_rot}};
  j["impedance"] = imp;

  j["window"] = json{{"stance", {c.window.stance_start, c.window.stance_end}},
                     {"swing", {c.window.swing_start, c.window.swing_end}}};
  j["dt"] = c.dt;
  j["transient_discard"] = c.transient_discard;
  if (std::isinf(c.snr_db))
    j["snr_db"] = nullptr;
  else
    j["snr_db"] = c.snr_db;
  j["gamma"] = c.gamma;
  j["seed"] = c.seed;
  j["actuation"] = c.actuation;
  j["stability_margin"] = c.stability_margin;
  j["out_dir"] = c.out_dir;
  return j;
}

}  // namespace

void save_scenario(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scenario: cannot open '" + path + "'");
  out << scenario_to_json(config).dump(2) << "\n";
}

ResolvedScenario resolve_scenario(const ScenarioConfig& config) {
  config.validate();
  ResolvedScenario r;
  r.config = config;

  if (!config.model_file.empty()) {
    r.exo = std::make_shared<ExoskeletonModel>(load_model(config.model_file));
  } else {
    const Anthropometrics anthro = anthropometrics_percentile(config.percentile);
    r.exo = std::make_shared<ExoskeletonModel>(build_exoskeleton(anthro, config.build_options));
  }
  r.human = std::make_shared<HumanModel>(build_human(r.exo->anthro));

  r.gait = config.gait_file.empty() ? synthetic_gait(config.synthetic) : load_gait(config.gait_file);
  r.harness = config.harness_file.empty() ? config_from_code(config.harness_preset)
                                          : load_harness_config(config.harness_file);
  return r;
}

EpisodeSpec ResolvedScenario::episode() const {
  EpisodeSpec spec;
  spec.exo = exo;
  spec.human = human;
  spec.harness = harness;
  spec.gait = gait;
  spec.window = config.window;
  spec.dt = config.dt;
  spec.transient_discard = config.transient_discard;
  spec.snr_db = config.snr_db;
  spec.gamma = config.gamma;
  spec.seed = config.seed;
  spec.stability_margin = config.stability_margin;
  spec.actuation = config.actuation == "zero" ? ActuationPolicy::Zero
                                              : ActuationPolicy::GravityCompensation;
  spec.impedance[kPelvis] = config.pelvis.params();
  if (config.impedance_mode == "explicit") {
    for (int i = 0; i < kNumOptimizedInterfaces; ++i) {
      spec.impedance[i] = harness.detached_interface(i) ? ImpedanceParams{}
                                                        : config.explicit_impedance[interface_type(i)];
    }
  } else {
    spec.impedance = anchor_impedances(spec);
  }
  return spec;
}

std::array<ImpedanceParams, kNumInterfaces> anchor_impedances(const EpisodeSpec& episode_template,
                                                              bool tie_legs) {
  EpisodeSpec tmp = episode_template;
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) tmp.impedance[i] = ImpedanceParams{};
  OptimizationProblem prob = OptimizationProblem::make(tmp);
  prob.tie_legs = tie_legs;
  return prob.impedances_from(prob.anchor());
}

std::string ResolvedScenario::provenance_json() const {
  json j;
  j["tool"] = "exosim";
  j["version"] = kExosimVersion;
  j["scenario"] = scenario_to_json(config);
  j["harness_code"] = harness.code_string();
  j["dof_count"] = exo->tree.dof_count();
  j["total_mass"] = exo->tree.total_mass();
  return j.dump();
}

}  // namespace exosim
