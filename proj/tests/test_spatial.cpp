#include "exosim/spatial.hpp"

#include <random>

#include "doctest.h"

using namespace exosim;

namespace {

std::mt19937_64 rng(42);

double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  return d(rng);
}

Vec3 random_vec(double scale = 1.0) {
  return Vec3(uniform(-scale, scale), uniform(-scale, scale), uniform(-scale, scale));
}

Rotation random_rotation() {
  const Vec3 axis = random_vec().normalized();
  return Rotation::from_axis_angle(axis, uniform(-M_PI, M_PI));
}

Transform random_transform() { return Transform(random_rotation(), random_vec(2.0)); }

}  // namespace

TEST_CASE("compose: identity and inverse") {
  const Transform t = random_transform();
  const Transform id = Transform::identity();

  const Transform a = compose(id, t);
  CHECK(a.rotation.approx_equal(t.rotation, 1e-12));
  CHECK((a.translation - t.translation).norm() < 1e-12);

  const Transform b = compose(t, inverse(t));
  CHECK(b.rotation.approx_equal(Rotation::identity(), 1e-9));
  CHECK(b.translation.norm() < 1e-9);
}

TEST_CASE("compose: two z-rotations make a half turn") {
  const Transform rot90 = Transform::rotate(Rotation::from_axis_angle(Vec3::UnitZ(), M_PI / 2));
  const Transform rot180 = compose(rot90, rot90);
  const Vec3 p = rot180.apply(Vec3(1, 0, 0));
  CHECK(p.x() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(p.y() == doctest::Approx(0.0).epsilon(1e-12));

  // Composition maps through b then a.
  const Transform shift = Transform::translate(Vec3(1, 0, 0));
  const Transform both = compose(rot90, shift);
  const Vec3 q = both.apply(Vec3::Zero());
  CHECK(q.isApprox(Vec3(0, 1, 0), 1e-12));
}

TEST_CASE("transform_motion: identity and pure rotation") {
  const SpatialMotion m(Vec3(1, 0, 0), Vec3(0, 0, 0));
  const SpatialMotion same = transform_motion(Transform::identity(), m);
  CHECK((same.angular - m.angular).norm() == 0.0);

  const Transform rotz = Transform::rotate(Rotation::from_axis_angle(Vec3::UnitZ(), M_PI / 2));
  const SpatialMotion r = transform_motion(rotz, m);
  CHECK(r.angular.isApprox(Vec3(0, 1, 0), 1e-12));
  CHECK(r.linear.norm() < 1e-12);
}

TEST_CASE("transform_motion: pure translation against the point-velocity oracle") {
  // Body rotates about an axis through frame B's origin. Frame A sits so that
  // B's origin is at p in A coordinates. The linear part of the motion in A
  // must equal the velocity of the body point at A's origin: v = w x r with
  // r measured from the rotation axis.
  const Transform t = Transform::translate(Vec3(0, 0, 1));
  const SpatialMotion m(Vec3(1, 0, 0), Vec3::Zero());
  const SpatialMotion out = transform_motion(t, m);
  CHECK(out.angular.isApprox(Vec3(1, 0, 0), 1e-12));
  CHECK(out.linear.isApprox(Vec3(0, 1, 0), 1e-12));

  // Brute force over a grid of offsets: v_origin_of_A = w x (0 - p_B_in_A).
  for (int i = 0; i < 50; ++i) {
    const Vec3 p = random_vec(2.0);
    const Vec3 w = random_vec(3.0);
    const SpatialMotion body(w, Vec3::Zero());
    const SpatialMotion in_a = transform_motion(Transform::translate(p), body);
    const Vec3 oracle = w.cross(-p);
    CHECK((in_a.linear - oracle).norm() < 1e-12);
  }
}

TEST_CASE("transform_force: offset force produces the r x F torque") {
  const Transform t = Transform::translate(Vec3(1, 0, 0));
  const SpatialForce f(Vec3::Zero(), Vec3(0, 0, 1));
  const SpatialForce out = transform_force(t, f);
  CHECK(out.force.isApprox(Vec3(0, 0, 1), 1e-12));
  CHECK(out.torque.isApprox(Vec3(0, -1, 0), 1e-12));

  for (int i = 0; i < 50; ++i) {
    const Vec3 r = random_vec(2.0);
    const Vec3 force = random_vec(5.0);
    const SpatialForce local(Vec3::Zero(), force);
    const SpatialForce moved = transform_force(Transform::translate(r), local);
    CHECK((moved.torque - r.cross(force)).norm() < 1e-12);
  }
}

TEST_CASE("power pairing is invariant under frame changes") {
  for (int i = 0; i < 1000; ++i) {
    const Transform t = random_transform();
    const SpatialMotion m(random_vec(3.0), random_vec(3.0));
    const SpatialForce f(random_vec(5.0), random_vec(5.0));
    const double before = power_pairing(f, m);
    const double after = power_pairing(transform_force(t, f), transform_motion(t, m));
    CHECK(std::abs(before - after) < 1e-9 * std::max(1.0, std::abs(before)));
  }
}

TEST_CASE("motion round-trip through a transform and its inverse") {
  for (int i = 0; i < 1000; ++i) {
    const Transform t = random_transform();
    const SpatialMotion m(random_vec(3.0), random_vec(3.0));
    const SpatialMotion back = transform_motion(inverse(t), transform_motion(t, m));
    CHECK((back.angular - m.angular).norm() < 1e-9);
    CHECK((back.linear - m.linear).norm() < 1e-9);
  }
}

TEST_CASE("rotation vector round trip and pi tie-break") {
  for (int i = 0; i < 200; ++i) {
    const Rotation r = random_rotation();
    const Rotation back = Rotation::from_rotation_vector(r.rotation_vector());
    CHECK(r.approx_equal(back, 1e-9));
  }
  // At exactly pi the axis sign is canonical.
  const Rotation half_turn = Rotation::from_axis_angle(Vec3(0, 0, -1), M_PI);
  const Vec3 rv = half_turn.rotation_vector();
  CHECK(rv.z() == doctest::Approx(M_PI));
}

TEST_CASE("quaternion storage stays normalized through composition") {
  Rotation r = Rotation::identity();
  const Rotation step = Rotation::from_axis_angle(Vec3(0.3, 0.5, 0.8).normalized(), 0.37);
  for (int i = 0; i < 10000; ++i) r = r * step;
  CHECK(std::abs(r.quaternion().norm() - 1.0) < 1e-9);
}

TEST_CASE("spatial inertia: validation and PSD under transforms") {
  const SpatialInertia rod(2.0, Vec3(0.1, 0, 0.2),
                           Vec3(0.02, 0.05, 0.05).asDiagonal());
  rod.validate();

  for (int i = 0; i < 200; ++i) {
    const SpatialInertia moved = transform_inertia(random_transform(), rod);
    const Mat6 m = moved.matrix();
    CHECK((m - m.transpose()).cwiseAbs().maxCoeff() < 1e-9);
    Eigen::SelfAdjointEigenSolver<Mat6> es(m);
    CHECK(es.eigenvalues().minCoeff() > -1e-9);
  }

  CHECK_THROWS_AS(SpatialInertia(-1.0, Vec3::Zero(), Mat3::Identity()).validate(),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      SpatialInertia(1.0, Vec3::Zero(), Vec3(1.0, 0.1, 0.1).asDiagonal()).validate(),
      std::invalid_argument);
}

TEST_CASE("kinetic energy matches the quadratic form of the inertia matrix") {
  for (int i = 0; i < 200; ++i) {
    const SpatialInertia body(uniform(0.1, 5.0), random_vec(0.3),
                              Vec3(uniform(0.01, 0.1), uniform(0.01, 0.1), uniform(0.01, 0.1))
                                  .asDiagonal());
    const SpatialMotion m(random_vec(2.0), random_vec(2.0));
    const double direct = body.kinetic_energy(m);
    const double quadratic = 0.5 * m.vector().dot(body.matrix() * m.vector());
    CHECK(direct == doctest::Approx(quadratic).epsilon(1e-10));
  }
}
