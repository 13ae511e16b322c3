#pragma once

// 3D/6D spatial algebra: rotations, rigid transforms, spatial motion/force
// vectors and rigid-body inertias.
//
// Conventions (fixed here, imported by every other module):
//  - A Transform T = (R, p) is the pose of frame B in frame A and maps
//    coordinates from B to A:  x_A = R * x_B + p.
//  - Spatial vectors are stacked [angular; linear].
//  - The linear part of a SpatialMotion is the velocity of the body-fixed
//    point coincident with the frame origin, expressed in that frame.
//  - The angular part of a SpatialForce is the torque about the frame
//    origin, expressed in that frame.
//  - Motion transform (B -> A):  w_A = R w_B,  v_A = R v_B + p x (R w_B).
//  - Force transform  (B -> A):  n_A = R n_B + p x (R f_B),  f_A = R f_B.
//  These two laws are duals: the power pairing <force, motion> is invariant
//  under any frame change.

#include <Eigen/Core>
#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>
#include <stdexcept>

namespace exosim {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(), v.z(), 0.0, -v.x(), -v.y(), v.x(), 0.0;
  return m;
}

/// Rotation stored as a unit quaternion; matrix view available on demand.
class Rotation {
 public:
  Rotation() : q_(Eigen::Quaterniond::Identity()) {}

  explicit Rotation(const Eigen::Quaterniond& q) : q_(q.normalized()) {}

  static Rotation identity() { return Rotation(); }

  static Rotation from_matrix(const Mat3& m) { return Rotation(Eigen::Quaterniond(m)); }

  static Rotation from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n < 1e-12) throw std::invalid_argument("Rotation::from_axis_angle: zero axis");
    return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(angle, axis / n)));
  }

  /// Rotation vector (axis * angle). Exact at zero; at exactly pi the axis
  /// sign is ambiguous and the tie is broken by making the first nonzero
  /// component positive.
  static Rotation from_rotation_vector(const Vec3& rv) {
    const double angle = rv.norm();
    if (angle < 1e-12) {
      Eigen::Quaterniond q(1.0, 0.5 * rv.x(), 0.5 * rv.y(), 0.5 * rv.z());
      return Rotation(q);
    }
    return from_axis_angle(rv / angle, angle);
  }

  Vec3 rotation_vector() const {
    Eigen::AngleAxisd aa(q_);
    double angle = aa.angle();
    Vec3 axis = aa.axis();
    // Map to the shortest representation, angle in [0, pi].
    if (angle > M_PI) {
      angle = 2.0 * M_PI - angle;
      axis = -axis;
    }
    if (std::abs(angle - M_PI) < 1e-12) {
      for (int i = 0; i < 3; ++i) {
        if (std::abs(axis[i]) > 1e-9) {
          if (axis[i] < 0.0) axis = -axis;
          break;
        }
      }
    }
    return axis * angle;
  }

  double angle() const {
    double a = Eigen::AngleAxisd(q_).angle();
    return a > M_PI ? 2.0 * M_PI - a : a;
  }

  Mat3 matrix() const { return q_.toRotationMatrix(); }
  const Eigen::Quaterniond& quaternion() const { return q_; }

  Rotation operator*(const Rotation& o) const { return Rotation(q_ * o.q_); }
  Rotation inverse() const { return Rotation(q_.conjugate()); }
  Vec3 operator*(const Vec3& v) const { return q_ * v; }

  bool approx_equal(const Rotation& o, double tol = 1e-9) const {
    return q_.angularDistance(o.q_) < tol;
  }

 private:
  Eigen::Quaterniond q_;
};

/// Rigid transform: pose of a child frame in a parent frame.
struct Transform {
  Rotation rotation;
  Vec3 translation = Vec3::Zero();

  Transform() = default;
  Transform(const Rotation& r, const Vec3& t) : rotation(r), translation(t) {}

  static Transform identity() { return Transform(); }
  static Transform translate(const Vec3& t) { return Transform(Rotation::identity(), t); }
  static Transform rotate(const Rotation& r) { return Transform(r, Vec3::Zero()); }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_direction(const Vec3& d) const { return rotation * d; }
};

inline Transform compose(const Transform& a, const Transform& b) {
  return Transform(a.rotation * b.rotation, a.rotation * b.translation + a.translation);
}

inline Transform inverse(const Transform& t) {
  const Rotation rinv = t.rotation.inverse();
  return Transform(rinv, -(rinv * t.translation));
}

struct SpatialMotion {
  Vec3 angular = Vec3::Zero();  // rad/s
  Vec3 linear = Vec3::Zero();   // m/s, at the frame origin

  SpatialMotion() = default;
  SpatialMotion(const Vec3& w, const Vec3& v) : angular(w), linear(v) {}

  static SpatialMotion zero() { return SpatialMotion(); }

  Vec6 vector() const {
    Vec6 v;
    v << angular, linear;
    return v;
  }
  static SpatialMotion from_vector(const Vec6& v) {
    return SpatialMotion(v.head<3>(), v.tail<3>());
  }

  SpatialMotion operator+(const SpatialMotion& o) const {
    return SpatialMotion(angular + o.angular, linear + o.linear);
  }
  SpatialMotion operator-(const SpatialMotion& o) const {
    return SpatialMotion(angular - o.angular, linear - o.linear);
  }
  SpatialMotion operator*(double s) const { return SpatialMotion(angular * s, linear * s); }
};

struct SpatialForce {
  Vec3 torque = Vec3::Zero();  // N*m, about the frame origin
  Vec3 force = Vec3::Zero();   // N

  SpatialForce() = default;
  SpatialForce(const Vec3& n, const Vec3& f) : torque(n), force(f) {}

  static SpatialForce zero() { return SpatialForce(); }

  Vec6 vector() const {
    Vec6 v;
    v << torque, force;
    return v;
  }
  static SpatialForce from_vector(const Vec6& v) {
    return SpatialForce(v.head<3>(), v.tail<3>());
  }

  SpatialForce operator+(const SpatialForce& o) const {
    return SpatialForce(torque + o.torque, force + o.force);
  }
  SpatialForce operator-(const SpatialForce& o) const {
    return SpatialForce(torque - o.torque, force - o.force);
  }
  SpatialForce operator-() const { return SpatialForce(-torque, -force); }
  SpatialForce operator*(double s) const { return SpatialForce(torque * s, force * s); }
};

inline SpatialMotion transform_motion(const Transform& t, const SpatialMotion& m) {
  const Vec3 w = t.rotation * m.angular;
  return SpatialMotion(w, t.rotation * m.linear + t.translation.cross(w));
}

inline SpatialForce transform_force(const Transform& t, const SpatialForce& f) {
  const Vec3 fw = t.rotation * f.force;
  return SpatialForce(t.rotation * f.torque + t.translation.cross(fw), fw);
}

/// Power delivered by a wrench through a twist, invariant under frame change.
inline double power_pairing(const SpatialForce& f, const SpatialMotion& m) {
  return f.torque.dot(m.angular) + f.force.dot(m.linear);
}

/// Motion-vector cross product: d/dt of a motion vector carried by a moving frame.
inline SpatialMotion cross_motion(const SpatialMotion& a, const SpatialMotion& b) {
  return SpatialMotion(a.angular.cross(b.angular),
                       a.angular.cross(b.linear) + a.linear.cross(b.angular));
}

/// Force-vector cross product (dual of cross_motion).
inline SpatialForce cross_force(const SpatialMotion& a, const SpatialForce& f) {
  return SpatialForce(a.angular.cross(f.torque) + a.linear.cross(f.force),
                      a.angular.cross(f.force));
}

/// Rigid-body inertia: mass, center of mass and rotational inertia about the
/// CoM, all in one body frame.
struct SpatialInertia {
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia_com = Mat3::Zero();  // symmetric PSD, about the CoM

  SpatialInertia() = default;
  SpatialInertia(double m, const Vec3& c, const Mat3& ic) : mass(m), com(c), inertia_com(ic) {}

  static SpatialInertia zero() { return SpatialInertia(); }

  static SpatialInertia point_mass(double m, const Vec3& c) {
    return SpatialInertia(m, c, Mat3::Zero());
  }

  void validate() const {
    if (!(mass > 0.0)) throw std::invalid_argument("SpatialInertia: mass must be > 0");
    if ((inertia_com - inertia_com.transpose()).cwiseAbs().maxCoeff() > 1e-9)
      throw std::invalid_argument("SpatialInertia: inertia matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Mat3> es(inertia_com);
    const Vec3 ev = es.eigenvalues();
    const double tol = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    if (ev.minCoeff() < -tol)
      throw std::invalid_argument("SpatialInertia: inertia matrix not positive semi-definite");
    // Principal moments must satisfy the triangle inequality.
    if (ev[2] > ev[0] + ev[1] + tol)
      throw std::invalid_argument("SpatialInertia: principal moments violate triangle inequality");
  }

  /// Inertia about the frame origin (parallel axis).
  Mat3 inertia_origin() const {
    const Mat3 cx = skew(com);
    return inertia_com - mass * cx * cx;
  }

  /// Momentum of a body moving with twist m: h = I * m.
  SpatialForce apply(const SpatialMotion& m) const {
    const Vec3 h_ang =
        inertia_com * m.angular + mass * com.cross(m.angular.cross(com)) + mass * com.cross(m.linear);
    const Vec3 h_lin = mass * (m.linear + m.angular.cross(com));
    return SpatialForce(h_ang, h_lin);
  }

  double kinetic_energy(const SpatialMotion& m) const {
    return 0.5 * power_pairing(apply(m), m);
  }

  /// 6x6 matrix form [[I_O, m cx], [m cx^T, m 1]] in the [angular; linear] layout.
  Mat6 matrix() const {
    Mat6 out;
    const Mat3 cx = skew(com);
    out.topLeftCorner<3, 3>() = inertia_origin();
    out.topRightCorner<3, 3>() = mass * cx;
    out.bottomLeftCorner<3, 3>() = mass * cx.transpose();
    out.bottomRightCorner<3, 3>() = mass * Mat3::Identity();
    return out;
  }

  SpatialInertia operator+(const SpatialInertia& o) const {
    const double m = mass + o.mass;
    if (m <= 0.0) return SpatialInertia(0.0, Vec3::Zero(), inertia_com + o.inertia_com);
    const Vec3 c = (mass * com + o.mass * o.com) / m;
    auto shift = [](const SpatialInertia& b, const Vec3& to) {
      const Vec3 d = b.com - to;
      const Mat3 dx = skew(d);
      return Mat3(b.inertia_com - b.mass * dx * dx);
    };
    return SpatialInertia(m, c, shift(*this, c) + shift(o, c));
  }
};

/// Express an inertia given in frame B in frame A, with t the pose of B in A.
inline SpatialInertia transform_inertia(const Transform& t, const SpatialInertia& I) {
  const Mat3 R = t.rotation.matrix();
  return SpatialInertia(I.mass, t.apply(I.com), R * I.inertia_com * R.transpose());
}

}  // namespace exosim
