#include "exosim/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "exosim/dynamics.hpp"

namespace exosim {

using nlohmann::json;

void ImpedanceParams::validate() const {
  auto check = [](const Vec3& v, const char* what) {
    for (int i = 0; i < 3; ++i)
      if (!(v[i] >= 0.0) || !std::isfinite(v[i]))
        throw std::invalid_argument(std::string("impedance: ") + what + " entries must be >= 0");
  };
  check(k_rot, "k_rot");
  check(k_trans, "k_trans");
  check(d_rot, "d_rot");
  check(d_trans, "d_trans");
}

Eigen::Matrix<double, 12, 1> ImpedanceParams::flat() const {
  Eigen::Matrix<double, 12, 1> v;
  v << k_rot, k_trans, d_rot, d_trans;
  return v;
}

ImpedanceParams ImpedanceParams::from_flat(const Eigen::Matrix<double, 12, 1>& v) {
  ImpedanceParams p;
  p.k_rot = v.segment<3>(0);
  p.k_trans = v.segment<3>(3);
  p.d_rot = v.segment<3>(6);
  p.d_trans = v.segment<3>(9);
  return p;
}

InteractionWrench interaction_wrench(const ImpedanceParams& params, const FrameState& human,
                                     const FrameState& exo) {
  InteractionWrench out;
  const Rotation r_exo_inv = exo.pose.rotation.inverse();

  // Mismatches expressed in the exoskeleton attachment frame.
  const Rotation rel = r_exo_inv * human.pose.rotation;
  const double angle = rel.angle();
  if (std::abs(angle - M_PI) < 1e-9) out.orientation_tie_break = true;
  const Vec3 d_rot = rel.rotation_vector();
  const Vec3 d_pos = r_exo_inv * (human.pose.translation - exo.pose.translation);
  const Vec3 d_omega = r_exo_inv * (human.twist.angular - exo.twist.angular);
  const Vec3 d_vel = r_exo_inv * (human.twist.linear - exo.twist.linear);

  out.wrench.torque = params.k_rot.cwiseProduct(d_rot) + params.d_rot.cwiseProduct(d_omega);
  out.wrench.force = params.k_trans.cwiseProduct(d_pos) + params.d_trans.cwiseProduct(d_vel);
  return out;
}

void LockParams::validate() const {
  for (int i = 0; i < kHarnessDofs; ++i) {
    if (!(k_lock[i] >= 0.0) || !(d_lock[i] >= 0.0))
      throw std::invalid_argument("lock params: gains must be >= 0");
    const bool free_dof = !locked[i];
    if (free_dof && (k_lock[i] != 0.0 || d_lock[i] != 0.0))
      throw std::invalid_argument("lock params: free DoF must have both gains exactly zero");
  }
}

void accumulate_lock_torques(const LockParams& lock, const std::array<int, kHarnessDofs>& dofs,
                             const VecX& q, const VecX& qdot, VecX& out) {
  for (int i = 0; i < kHarnessDofs; ++i) {
    const int d = dofs[i];
    if (d < 0) continue;
    out[d] += lock.k_lock[i] * (q[d] - lock.rest[i]) + lock.d_lock[i] * qdot[d];
  }
}

double lock_spring_energy(const LockParams& lock, const std::array<int, kHarnessDofs>& dofs,
                          const VecX& q) {
  double e = 0.0;
  for (int i = 0; i < kHarnessDofs; ++i) {
    const int d = dofs[i];
    if (d < 0) continue;
    const double x = q[d] - lock.rest[i];
    e += 0.5 * lock.k_lock[i] * x * x;
  }
  return e;
}

// ---------------------------------------------------------------------------
// Configuration codes
// ---------------------------------------------------------------------------

namespace {

constexpr int kPx = 0, kPy = 1, kPz = 2, kRx = 3, kRy = 4, kRz = 5;

std::array<bool, kHarnessDofs> mask_of(std::initializer_list<int> free_dofs) {
  std::array<bool, kHarnessDofs> m{};
  for (int d : free_dofs) m[d] = true;
  return m;
}

// Harness frame axes: z longitudinal, y sagittal-normal, x the horizontal
// sagittal-parallel direction (vertical for the foot).
std::optional<std::array<std::array<bool, kHarnessDofs>, 3>> preset_mask(const std::string& code) {
  if (code == "[0 1 0]") {
    // Thigh and foot are embedments; the shank keeps the rotation about the
    // limb's longitudinal axis.
    return std::array<std::array<bool, kHarnessDofs>, 3>{
        mask_of({}), mask_of({kRz}), mask_of({})};
  }
  if (code == "[2 6 1]") {
    // Shank not connected; thigh keeps longitudinal translation and the
    // rotation about the sagittal-normal axis; foot keeps inversion-eversion.
    return std::array<std::array<bool, kHarnessDofs>, 3>{
        mask_of({kPz, kRy}), mask_of({kPx, kPy, kPz, kRx, kRy, kRz}), mask_of({kRz})};
  }
  if (code == "[3 3 2]") {
    // Thigh and shank free the longitudinal rotation and translation plus the
    // rotation about the horizontal sagittal-parallel axis; foot the same
    // minus the translation.
    return std::array<std::array<bool, kHarnessDofs>, 3>{
        mask_of({kPz, kRx, kRz}), mask_of({kPz, kRx, kRz}), mask_of({kRx, kRz})};
  }
  return std::nullopt;
}

std::array<int, 3> parse_code(const std::string& code) {
  std::string s = code;
  for (char& c : s)
    if (c == '[' || c == ']' || c == ',') c = ' ';
  std::istringstream is(s);
  std::array<int, 3> out{};
  for (int i = 0; i < 3; ++i) {
    if (!(is >> out[i]))
      throw std::invalid_argument("harness code '" + code + "' does not parse as three integers");
    if (out[i] < 0 || out[i] > 6)
      throw std::invalid_argument("harness code '" + code + "' has digits outside [0, 6]");
  }
  std::string rest;
  if (is >> rest) throw std::invalid_argument("harness code '" + code + "' has trailing content");
  return out;
}

}  // namespace

std::string HarnessConfig::code_string() const {
  std::ostringstream os;
  os << "[" << code[0] << " " << code[1] << " " << code[2] << "]";
  return os.str();
}

void HarnessConfig::validate() const {
  for (int t = 0; t < 3; ++t) {
    if (code[t] < 0 || code[t] > 6)
      throw std::invalid_argument("harness config: code digit outside [0, 6]");
    int popcount = 0;
    for (bool b : mask[t]) popcount += b ? 1 : 0;
    if (popcount != code[t]) {
      std::ostringstream os;
      os << "harness config " << code_string() << ": mask for interface type " << t << " frees "
         << popcount << " DoFs, expected " << code[t];
      throw std::invalid_argument(os.str());
    }
  }
  if (!(k_lock >= 0.0) || !(d_lock_scale >= 0.0))
    throw std::invalid_argument("harness config: lock gains must be >= 0");
}

bool HarnessConfig::detached(int interface_type) const { return code[interface_type] == 6; }

bool HarnessConfig::detached_interface(int interface_id) const {
  if (interface_id >= kNumOptimizedInterfaces) return false;
  return detached(interface_type(interface_id));
}

LockParams HarnessConfig::lock_params(int interface_type_idx,
                                      const std::array<double, kHarnessDofs>& dof_inertia,
                                      double dt, double stability_margin) const {
  // Locks and interface impedance can act on the same DoF, so the explicit
  // stability budget (|eig| dt <= margin) is split: locks get kLockShare of
  // the stiffness and damping-rate budget, the interface bounds the rest.
  LockParams lp;
  const auto& m = mask[interface_type_idx];
  for (int i = 0; i < kHarnessDofs; ++i) {
    lp.rest[i] = 0.0;
    if (m[i]) {
      lp.locked[i] = false;
      lp.k_lock[i] = 0.0;
      lp.d_lock[i] = 0.0;
    } else {
      lp.locked[i] = true;
      const double k_cap = kLockShare * stable_stiffness_limit(dof_inertia[i], dt, stability_margin);
      const double d_cap = kLockShare * stability_margin * dof_inertia[i] / dt;
      lp.k_lock[i] = std::min(k_lock, k_cap);
      lp.d_lock[i] =
          std::min(d_lock_scale * 2.0 * std::sqrt(lp.k_lock[i] * dof_inertia[i]), d_cap);
    }
  }
  return lp;
}

int interface_type(int interface_id) {
  switch (interface_id) {
    case kThighR:
    case kThighL: return 0;
    case kShankR:
    case kShankL: return 1;
    case kFootR:
    case kFootL: return 2;
    default: throw std::invalid_argument("interface_type: not an optimized interface");
  }
}

HarnessConfig config_from_code(
    const std::string& code,
    const std::optional<std::array<std::array<bool, kHarnessDofs>, 3>>& mask) {
  HarnessConfig cfg;
  cfg.code = parse_code(code);
  if (mask) {
    cfg.mask = *mask;
  } else {
    auto preset = preset_mask(cfg.code_string());
    if (!preset)
      throw std::invalid_argument("harness code " + cfg.code_string() +
                                  " is not a built-in preset; an explicit DoF mask is required");
    cfg.mask = *preset;
  }
  cfg.validate();
  return cfg;
}

bool is_preset_code(const std::string& code) {
  try {
    HarnessConfig cfg;
    cfg.code = parse_code(code);
    return preset_mask(cfg.code_string()).has_value();
  } catch (const std::invalid_argument&) {
    return false;
  }
}

std::array<std::string, 3> preset_codes() { return {"[0 1 0]", "[2 6 1]", "[3 3 2]"}; }

ImpedanceParams PelvisImpedance::params() const {
  ImpedanceParams p;
  p.k_trans = Vec3::Constant(k_trans);
  p.k_rot = Vec3::Constant(k_rot);
  p.d_trans = Vec3::Constant(2.0 * std::sqrt(k_trans * effective_mass));
  p.d_rot = Vec3::Constant(2.0 * std::sqrt(k_rot * effective_inertia));
  return p;
}

// ---------------------------------------------------------------------------
// Layout file
// ---------------------------------------------------------------------------

void save_harness_config(const HarnessConfig& config, const std::string& path) {
  config.validate();
  json j;
  j["format_version"] = 1;
  j["kind"] = "harness_layout";
  j["code"] = config.code_string();
  json masks = json::object();
  const std::array<std::string, 3> type_names = {"thigh", "shank", "foot"};
  for (int t = 0; t < 3; ++t) {
    json free_list = json::array();
    for (int d = 0; d < kHarnessDofs; ++d)
      if (config.mask[t][d]) free_list.push_back(kHarnessDofNames[d]);
    masks[type_names[t]] = free_list;
  }
  j["free_dofs"] = masks;
  j["k_lock"] = config.k_lock;
  j["d_lock_scale"] = config.d_lock_scale;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_harness_config: cannot open '" + path + "'");
  out << j.dump(2) << "\n";
}

HarnessConfig load_harness_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_harness_config: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_harness_config: '" + path + "' is not valid JSON: " + e.what());
  }
  if (j.value("kind", "") != std::string("harness_layout"))
    throw std::runtime_error("load_harness_config: '" + path + "' is not a harness layout file");

  HarnessConfig cfg;
  const std::array<std::string, 3> type_names = {"thigh", "shank", "foot"};
  std::array<std::array<bool, kHarnessDofs>, 3> mask{};
  const json& masks = j.at("free_dofs");
  for (int t = 0; t < 3; ++t) {
    for (const auto& name : masks.at(type_names[t])) {
      bool found = false;
      for (int d = 0; d < kHarnessDofs; ++d) {
        if (name.get<std::string>() == kHarnessDofNames[d]) {
          mask[t][d] = true;
          found = true;
          break;
        }
      }
      if (!found)
        throw std::runtime_error("load_harness_config: unknown DoF name '" +
                                 name.get<std::string>() + "'");
    }
  }
  cfg.mask = mask;
  cfg.code = parse_code(j.at("code").get<std::string>());
  cfg.k_lock = j.value("k_lock", cfg.k_lock);
  cfg.d_lock_scale = j.value("d_lock_scale", cfg.d_lock_scale);
  cfg.validate();
  return cfg;
}

}  // namespace exosim
