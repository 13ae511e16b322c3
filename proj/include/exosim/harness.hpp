#pragma once

// Harness mechanics: the spring-damper interaction wrench at each interface,
// the lock torques that freeze selected harness DoFs, and the [x y z]
// configuration codes mapping free/locked DoFs per interface.

#include <array>
#include <optional>
#include <string>

#include "exosim/model.hpp"

namespace exosim {

/// Diagonal interface impedance in the exoskeleton attachment frame.
/// Component order matches spatial vectors: rotational x/y/z then
/// translational x/y/z.
struct ImpedanceParams {
  Vec3 k_rot = Vec3::Zero();    // N*m/rad
  Vec3 k_trans = Vec3::Zero();  // N/m
  Vec3 d_rot = Vec3::Zero();    // N*m*s/rad
  Vec3 d_trans = Vec3::Zero();  // N*s/m

  void validate() const;
  bool is_zero() const {
    return k_rot.isZero(0.0) && k_trans.isZero(0.0) && d_rot.isZero(0.0) && d_trans.isZero(0.0);
  }

  /// Flat 12-vector layout [k_rot, k_trans, d_rot, d_trans], the optimizer's
  /// per-interface variable block.
  Eigen::Matrix<double, 12, 1> flat() const;
  static ImpedanceParams from_flat(const Eigen::Matrix<double, 12, 1>& v);
};

/// Interaction wrench of one interface, expressed in the exoskeleton
/// attachment frame and applied to the exoskeleton (equal and opposite on
/// the human).
struct InteractionWrench {
  SpatialForce wrench;
  bool orientation_tie_break = false;  // relative rotation at pi, axis tie-broken
};

/// w = K (p_h - p_e) + D (pd_h - pd_e), with the orientation mismatch taken
/// as the rotation vector of R_e^T R_h.
InteractionWrench interaction_wrench(const ImpedanceParams& params, const FrameState& human,
                                     const FrameState& exo);

/// Per-harness-DoF lock spring: M_lock = K_lock (q - q0) + D_lock qd.
/// Free DoF <=> both gains exactly zero.
struct LockParams {
  std::array<bool, kHarnessDofs> locked{true, true, true, true, true, true};
  std::array<double, kHarnessDofs> k_lock{};
  std::array<double, kHarnessDofs> d_lock{};
  std::array<double, kHarnessDofs> rest{};  // q0

  void validate() const;
};

/// Lock torques for one harness chain; indices into the full DoF vector are
/// given by the interface's harness_dof map.
void accumulate_lock_torques(const LockParams& lock, const std::array<int, kHarnessDofs>& dofs,
                             const VecX& q, const VecX& qdot, VecX& out);

/// Potential energy stored in the lock springs of one chain.
double lock_spring_energy(const LockParams& lock, const std::array<int, kHarnessDofs>& dofs,
                          const VecX& q);

/// Harness configuration: the [x y z] free-DoF counts at thigh, shank and
/// foot plus the explicit per-interface masks naming which of the six
/// canonical DoFs (px py pz rx ry rz) are free. Applies to both legs.
struct HarnessConfig {
  std::array<int, 3> code{0, 0, 0};                    // thigh, shank, foot
  std::array<std::array<bool, kHarnessDofs>, 3> mask;  // true = free

  double k_lock = 1e5;  // per-unit defaults for locked DoFs
  double d_lock_scale = 1.0;  // multiplies the near-critical default damping

  std::string code_string() const;
  void validate() const;

  /// True when an interface is fully free, i.e. not connected to the wearer.
  bool detached(int interface_type) const;
  bool detached_interface(int interface_id) const;

  /// Lock parameters for one interface type (0 thigh, 1 shank, 2 foot),
  /// damping near-critical for the given per-DoF inertias, gains capped by
  /// the explicit-integration stability limit for step dt.
  LockParams lock_params(int interface_type, const std::array<double, kHarnessDofs>& dof_inertia,
                         double dt, double stability_margin = 2.0) const;
};

/// Shares of the per-DoF explicit stability budget: lock springs take
/// kLockShare, the interface impedance bounds take the complement.
inline constexpr double kLockShare = 0.75;
inline constexpr double kInterfaceShare = 0.25;

/// Interface type (0 thigh, 1 shank, 2 foot) of an optimized interface id.
int interface_type(int interface_id);

/// Parses a "[x y z]" code. The three named layouts carry built-in masks;
/// any other code requires an explicit mask.
HarnessConfig config_from_code(const std::string& code,
                               const std::optional<std::array<std::array<bool, kHarnessDofs>, 3>>&
                                   mask = std::nullopt);

/// Built-in preset layouts: "[0 1 0]", "[2 6 1]", "[3 3 2]".
bool is_preset_code(const std::string& code);
std::array<std::string, 3> preset_codes();

/// Fixed pelvis-interface impedance (not an optimization variable).
struct PelvisImpedance {
  double k_trans = 1e4;   // N/m
  double k_rot = 500.0;   // N*m/rad
  double effective_mass = 3.0;      // for the near-critical damping default
  double effective_inertia = 0.05;

  ImpedanceParams params() const;
};

// Harness layout file (JSON): code, masks, gains, rest positions.
void save_harness_config(const HarnessConfig& config, const std::string& path);
HarnessConfig load_harness_config(const std::string& path);

}  // namespace exosim
