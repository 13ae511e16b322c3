#include "exosim/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace exosim {

namespace {

inline SpatialMotion joint_subspace_motion(const JointSpec& j, double scale) {
  if (j.kind == JointKind::Revolute) return SpatialMotion(j.axis * scale, Vec3::Zero());
  return SpatialMotion(Vec3::Zero(), j.axis * scale);
}

inline double subspace_dot(const JointSpec& j, const SpatialForce& f) {
  if (j.kind == JointKind::Revolute) return j.axis.dot(f.torque);
  return j.axis.dot(f.force);
}

}  // namespace

GeneralizedForces inverse_dynamics(const KinematicTree& tree, const VecX& q, const VecX& qdot,
                                   const VecX& qddot, const Vec3& gravity,
                                   const std::vector<ExternalWrench>& wrenches) {
  const int n = tree.dof_count();
  const int nb = tree.body_count();
  if (q.size() != n || qdot.size() != n || qddot.size() != n) {
    std::ostringstream os;
    os << "inverse_dynamics: dimension mismatch (n=" << n << ", q=" << q.size()
       << ", qdot=" << qdot.size() << ", qddot=" << qddot.size() << ")";
    throw std::invalid_argument(os.str());
  }

  std::vector<Transform> to_parent(nb);   // pose of body i in its parent frame
  std::vector<Transform> world(nb);       // pose of body i in the world frame
  std::vector<SpatialMotion> v(nb), a(nb);
  std::vector<SpatialForce> f(nb);

  world[0] = tree.base_pose();
  v[0] = SpatialMotion::zero();
  // Fixed base accelerating at -g makes gravity appear on every body.
  a[0] = SpatialMotion(Vec3::Zero(), -(tree.base_pose().rotation.inverse() * gravity));
  f[0] = SpatialForce::zero();

  for (int i = 1; i < nb; ++i) {
    const int p = tree.parent(i);
    const JointSpec& j = tree.joint(i);
    const int d = i - 1;
    to_parent[i] = joint_transform(j, q[d]);
    world[i] = compose(world[p], to_parent[i]);
    const Transform from_parent = inverse(to_parent[i]);

    const SpatialMotion vj = joint_subspace_motion(j, qdot[d]);
    v[i] = transform_motion(from_parent, v[p]) + vj;
    a[i] = transform_motion(from_parent, a[p]) + joint_subspace_motion(j, qddot[d]) +
           cross_motion(v[i], vj);

    const SpatialInertia& I = tree.body(i).inertia;
    f[i] = I.apply(a[i]) + cross_force(v[i], I.apply(v[i]));
  }

  // External wrenches: express each about its body's frame origin, body coords.
  for (const auto& w : wrenches) {
    if (w.body <= 0 || w.body >= nb)
      throw std::invalid_argument("inverse_dynamics: external wrench body index out of range");
    const Vec3 p_world = world[w.body].apply(w.point);
    const Transform point_in_body = compose(inverse(world[w.body]), Transform::translate(p_world));
    f[w.body] = f[w.body] - transform_force(point_in_body, w.wrench);
  }

  GeneralizedForces tau = GeneralizedForces::Zero(n);
  for (int i = nb - 1; i >= 1; --i) {
    const JointSpec& j = tree.joint(i);
    tau[i - 1] = subspace_dot(j, f[i]) + j.armature * qddot[i - 1];
    const int p = tree.parent(i);
    if (p >= 0) f[p] = f[p] + transform_force(to_parent[i], f[i]);
  }
  return tau;
}

MatX mass_matrix(const KinematicTree& tree, const VecX& q) {
  const int n = tree.dof_count();
  const int nb = tree.body_count();
  if (q.size() != n) throw std::invalid_argument("mass_matrix: q dimension mismatch");

  std::vector<Transform> to_parent(nb);
  for (int i = 1; i < nb; ++i) to_parent[i] = joint_transform(tree.joint(i), q[i - 1]);

  std::vector<SpatialInertia> composite(nb);
  for (int i = 0; i < nb; ++i) composite[i] = tree.body(i).inertia;
  for (int i = nb - 1; i >= 1; --i) {
    const int p = tree.parent(i);
    composite[p] = composite[p] + transform_inertia(to_parent[i], composite[i]);
  }

  MatX B = MatX::Zero(n, n);
  for (int i = 1; i < nb; ++i) {
    const JointSpec& ji = tree.joint(i);
    SpatialForce f = composite[i].apply(joint_subspace_motion(ji, 1.0));
    B(i - 1, i - 1) = subspace_dot(ji, f) + ji.armature;
    int j = i;
    while (tree.parent(j) > 0) {
      f = transform_force(to_parent[j], f);
      j = tree.parent(j);
      const double h = subspace_dot(tree.joint(j), f);
      B(i - 1, j - 1) = h;
      B(j - 1, i - 1) = h;
    }
  }
  return B;
}

VecX bias_forces(const KinematicTree& tree, const VecX& q, const VecX& qdot, const Vec3& gravity) {
  return inverse_dynamics(tree, q, qdot, VecX::Zero(tree.dof_count()), gravity);
}

DynamicsTerms dynamics_terms(const KinematicTree& tree, const VecX& q, const VecX& qdot,
                             const Vec3& gravity) {
  DynamicsTerms t;
  t.B = mass_matrix(tree, q);
  t.bias = bias_forces(tree, q, qdot, gravity);
  t.g = bias_forces(tree, q, VecX::Zero(tree.dof_count()), gravity);
  return t;
}

VecX generalized_wrench_forces(const KinematicTree& tree, const VecX& q,
                               const std::vector<ExternalWrench>& wrenches) {
  VecX out = VecX::Zero(tree.dof_count());
  if (wrenches.empty()) return out;
  const auto pose = forward_poses(tree, q);
  for (const auto& w : wrenches) {
    if (w.body <= 0 || w.body >= tree.body_count())
      throw std::invalid_argument("generalized_wrench_forces: body index out of range");
    const Vec3 p = pose[w.body].apply(w.point);
    // J^T w accumulated along the support path only.
    for (int i = w.body; i != 0; i = tree.parent(i)) {
      const JointSpec& j = tree.joint(i);
      const Vec3 axis_w = pose[i].rotation * j.axis;
      if (j.kind == JointKind::Revolute)
        out[i - 1] += axis_w.dot(w.wrench.torque) +
                      axis_w.cross(p - pose[i].translation).dot(w.wrench.force);
      else
        out[i - 1] += axis_w.dot(w.wrench.force);
    }
  }
  return out;
}

VecX forward_dynamics(const KinematicTree& tree, const SystemState& state, const VecX& tau,
                      const std::vector<ExternalWrench>& wrenches, const VecX& lock_torques,
                      const Vec3& gravity) {
  tree.check_state(state);
  const int n = tree.dof_count();
  if (tau.size() != n) throw std::invalid_argument("forward_dynamics: tau dimension mismatch");
  if (lock_torques.size() != 0 && lock_torques.size() != n)
    throw std::invalid_argument("forward_dynamics: lock torque dimension mismatch");

  const MatX B = mass_matrix(tree, state.q);
  VecX rhs = tau + generalized_wrench_forces(tree, state.q, wrenches) -
             bias_forces(tree, state.q, state.qdot, gravity);
  if (lock_torques.size() == n) rhs -= lock_torques;

  Eigen::LLT<MatX> llt(B);
  if (llt.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<MatX> es(B);
    int worst = 0;
    es.eigenvectors().col(0).cwiseAbs().maxCoeff(&worst);
    std::ostringstream os;
    os << "forward_dynamics: inertia matrix not positive definite (min eigenvalue "
       << es.eigenvalues()(0) << ", dominated by DoF '" << tree.dof_name(worst) << "')";
    throw std::runtime_error(os.str());
  }
  return llt.solve(rhs);
}

double kinetic_energy(const KinematicTree& tree, const SystemState& state) {
  tree.check_state(state);
  const int nb = tree.body_count();
  std::vector<SpatialMotion> v(nb);
  v[0] = SpatialMotion::zero();
  double ke = 0.0;
  std::vector<Transform> to_parent(nb);
  for (int i = 1; i < nb; ++i) {
    const JointSpec& j = tree.joint(i);
    const int d = i - 1;
    to_parent[i] = joint_transform(j, state.q[d]);
    v[i] = transform_motion(inverse(to_parent[i]), v[tree.parent(i)]) +
           joint_subspace_motion(j, state.qdot[d]);
    ke += tree.body(i).inertia.kinetic_energy(v[i]);
    ke += 0.5 * j.armature * state.qdot[d] * state.qdot[d];
  }
  return ke;
}

double potential_energy(const KinematicTree& tree, const VecX& q, const Vec3& gravity) {
  const auto pose = forward_poses(tree, q);
  double pe = 0.0;
  for (int i = 0; i < tree.body_count(); ++i) {
    const auto& I = tree.body(i).inertia;
    if (I.mass <= 0.0) continue;
    pe -= I.mass * gravity.dot(pose[i].apply(I.com));
  }
  return pe;
}

namespace {

struct Derivative {
  VecX dq;
  VecX dqd;
};

Derivative eval_derivative(const KinematicTree& tree, const SystemState& s,
                           const ForcesCallback& forces, const Vec3& gravity) {
  const ForceInput in = forces(s);
  return Derivative{s.qdot, forward_dynamics(tree, s, in.tau, in.wrenches, in.lock_torques, gravity)};
}

}  // namespace

SystemState integrate_step(const KinematicTree& tree, const SystemState& state,
                           const ForcesCallback& forces, double dt, IntegrationScheme scheme,
                           const Vec3& gravity) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_step: dt must be > 0");
  tree.check_state(state);

  SystemState out;
  out.time = state.time + dt;

  if (scheme == IntegrationScheme::SemiImplicitEuler) {
    const Derivative k = eval_derivative(tree, state, forces, gravity);
    out.qdot = state.qdot + dt * k.dqd;
    out.q = state.q + dt * out.qdot;
  } else {
    auto at = [&](double h, const Derivative& k) {
      SystemState s;
      s.q = state.q + h * k.dq;
      s.qdot = state.qdot + h * k.dqd;
      s.time = state.time + h;
      return s;
    };
    const Derivative k1 = eval_derivative(tree, state, forces, gravity);
    const Derivative k2 = eval_derivative(tree, at(0.5 * dt, k1), forces, gravity);
    const Derivative k3 = eval_derivative(tree, at(0.5 * dt, k2), forces, gravity);
    const Derivative k4 = eval_derivative(tree, at(dt, k3), forces, gravity);
    out.q = state.q + (dt / 6.0) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    out.qdot = state.qdot + (dt / 6.0) * (k1.dqd + 2.0 * k2.dqd + 2.0 * k3.dqd + k4.dqd);
  }

  if (!out.q.allFinite() || !out.qdot.allFinite()) {
    std::ostringstream os;
    os << "integration diverged at t=" << state.time << " (non-finite state after step)";
    throw IntegrationDivergence(state, os.str());
  }
  return out;
}

double stable_stiffness_limit(double inertia, double dt, double margin) {
  if (!(dt > 0.0) || !(inertia > 0.0)) return 0.0;
  const double w = margin / dt;
  return w * w * inertia;
}

}  // namespace exosim
