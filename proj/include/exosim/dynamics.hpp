#pragma once

// Tree dynamics: recursive Newton-Euler inverse dynamics, composite-rigid-body
// mass matrix, forward dynamics by SPD factorization, and explicit integrators.
//
// The dynamics satisfy  B(q) qdd + C(q, qd) qd + g(q) = tau + sum J^T w - M_lock,
// with external wrenches w expressed in world coordinates about their
// application point and lock torques entering resistively.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "exosim/model.hpp"

namespace exosim {

using GeneralizedForces = VecX;

inline const Vec3 kDefaultGravity(0.0, 0.0, -9.81);

/// External wrench applied to a body: `point` in body coordinates, `wrench`
/// in world coordinates with torque taken about the (world-positioned) point.
struct ExternalWrench {
  int body = -1;
  Vec3 point = Vec3::Zero();
  SpatialForce wrench;
};

struct DynamicsTerms {
  MatX B;     // joint-space inertia matrix, symmetric positive definite
  VecX bias;  // C(q, qd) qd + g(q)
  VecX g;     // gravity vector alone
};

/// tau = B qdd + C qd + g - sum J^T w, via recursive Newton-Euler.
GeneralizedForces inverse_dynamics(const KinematicTree& tree, const VecX& q, const VecX& qdot,
                                   const VecX& qddot, const Vec3& gravity,
                                   const std::vector<ExternalWrench>& wrenches = {});

/// B(q) via the composite-rigid-body algorithm (armature included).
MatX mass_matrix(const KinematicTree& tree, const VecX& q);

/// C qd + g, computed as inverse dynamics with qdd = 0 and no wrenches.
VecX bias_forces(const KinematicTree& tree, const VecX& q, const VecX& qdot, const Vec3& gravity);

DynamicsTerms dynamics_terms(const KinematicTree& tree, const VecX& q, const VecX& qdot,
                             const Vec3& gravity);

/// Generalized forces equivalent to the external wrenches: sum J^T w.
VecX generalized_wrench_forces(const KinematicTree& tree, const VecX& q,
                               const std::vector<ExternalWrench>& wrenches);

/// qdd = B^{-1} (tau + sum J^T w - lock_torques - C qd - g), solved by LLT.
VecX forward_dynamics(const KinematicTree& tree, const SystemState& state, const VecX& tau,
                      const std::vector<ExternalWrench>& wrenches, const VecX& lock_torques,
                      const Vec3& gravity = kDefaultGravity);

/// Kinetic energy, body twists plus armature contributions.
double kinetic_energy(const KinematicTree& tree, const SystemState& state);

/// Gravitational potential energy (zero level at world z = 0).
double potential_energy(const KinematicTree& tree, const VecX& q, const Vec3& gravity = kDefaultGravity);

struct ForceInput {
  VecX tau;
  std::vector<ExternalWrench> wrenches;
  VecX lock_torques;
};

using ForcesCallback = std::function<ForceInput(const SystemState&)>;

enum class IntegrationScheme { RungeKutta4, SemiImplicitEuler };

/// Thrown when a step produces a non-finite state; carries the last finite
/// state and its time so callers can truncate.
class IntegrationDivergence : public std::runtime_error {
 public:
  IntegrationDivergence(const SystemState& last, const std::string& what)
      : std::runtime_error(what), last_state(last) {}
  SystemState last_state;
};

/// Advances the state by dt under the configured scheme (default RK4).
SystemState integrate_step(const KinematicTree& tree, const SystemState& state,
                           const ForcesCallback& forces, double dt,
                           IntegrationScheme scheme = IntegrationScheme::RungeKutta4,
                           const Vec3& gravity = kDefaultGravity);

/// Largest stable stiffness on DoF i for an explicit scheme at step dt:
/// K_max = (margin / dt)^2 * B_ii. Used to cap lock gains and optimizer bounds.
double stable_stiffness_limit(double inertia, double dt, double margin = 2.0);

}  // namespace exosim
