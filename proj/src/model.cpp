#include "exosim/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace exosim {

using nlohmann::json;

const std::array<std::string, kNumInterfaces> kInterfaceNames = {
    "thigh_r", "shank_r", "foot_r", "thigh_l", "shank_l", "foot_l", "pelvis"};

const std::array<std::string, kHarnessDofs> kHarnessDofNames = {"px", "py", "pz",
                                                                "rx", "ry", "rz"};

const std::array<std::string, kGaitChannels> kGaitChannelNames = {
    "hip_flex_r",  "hip_abd_r",  "hip_rot_r",  "knee_flex_r", "knee_abd_r",  "knee_rot_r",
    "ankle_flex_r", "ankle_inv_r", "ankle_rot_r", "hip_flex_l",  "hip_abd_l",  "hip_rot_l",
    "knee_flex_l", "knee_abd_l", "knee_rot_l", "ankle_flex_l", "ankle_inv_l", "ankle_rot_l"};

// ---------------------------------------------------------------------------
// KinematicTree
// ---------------------------------------------------------------------------

KinematicTree::KinematicTree(const std::string& base_name, const Transform& base_pose,
                             const SpatialInertia& base_inertia)
    : base_pose_(base_pose) {
  BodySpec base;
  base.name = base_name;
  base.inertia = base_inertia;
  bodies_.push_back(base);
  joints_.push_back(JointSpec{});  // placeholder, never used
  parent_.push_back(-1);
  body_index_[base_name] = 0;
}

int KinematicTree::add_body(int parent, const JointSpec& joint, const BodySpec& body) {
  if (parent < 0 || parent >= body_count())
    throw std::invalid_argument("add_body: parent index out of range for body '" + body.name + "'");
  if (std::abs(joint.axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("add_body: joint axis must be unit length ('" + joint.name + "')");
  if (joint.lower_limit > joint.upper_limit)
    throw std::invalid_argument("add_body: joint limits inverted ('" + joint.name + "')");
  if (body_index_.count(body.name))
    throw std::invalid_argument("add_body: duplicate body name '" + body.name + "'");
  if (joint_index_.count(joint.name))
    throw std::invalid_argument("add_body: duplicate joint name '" + joint.name + "'");
  if (body.inertia.mass > 0.0) body.inertia.validate();

  const int idx = body_count();
  bodies_.push_back(body);
  joints_.push_back(joint);
  parent_.push_back(parent);
  body_index_[body.name] = idx;
  joint_index_[joint.name] = idx - 1;
  return idx;
}

void KinematicTree::add_attachment(const std::string& name, int body, const Transform& local_pose) {
  if (body < 0 || body >= body_count())
    throw std::invalid_argument("add_attachment: body index out of range for '" + name + "'");
  if (attachment_index_.count(name))
    throw std::invalid_argument("add_attachment: duplicate attachment '" + name + "'");
  attachment_index_[name] = static_cast<int>(attachments_.size());
  attachments_.push_back(AttachmentPoint{name, body, local_pose});
}

int KinematicTree::body_index(const std::string& name) const {
  auto it = body_index_.find(name);
  if (it == body_index_.end()) throw std::invalid_argument("unknown body '" + name + "'");
  return it->second;
}

const AttachmentPoint& KinematicTree::attachment(const std::string& name) const {
  auto it = attachment_index_.find(name);
  if (it == attachment_index_.end()) throw std::invalid_argument("unknown attachment '" + name + "'");
  return attachments_[it->second];
}

int KinematicTree::dof_index(const std::string& joint_name) const {
  auto it = joint_index_.find(joint_name);
  if (it == joint_index_.end()) throw std::invalid_argument("unknown joint '" + joint_name + "'");
  return it->second;
}

double KinematicTree::total_mass() const {
  double m = 0.0;
  for (const auto& b : bodies_) m += b.inertia.mass;
  return m;
}

void KinematicTree::check_state(const SystemState& s) const {
  if (s.q.size() != dof_count() || s.qdot.size() != dof_count()) {
    std::ostringstream os;
    os << "state dimension mismatch: expected " << dof_count() << " DoFs, got q=" << s.q.size()
       << " qdot=" << s.qdot.size();
    throw std::invalid_argument(os.str());
  }
}

Transform joint_transform(const JointSpec& joint, double q) {
  if (joint.kind == JointKind::Revolute)
    return compose(joint.parent_attachment, Transform::rotate(Rotation::from_axis_angle(joint.axis, q)));
  return compose(joint.parent_attachment, Transform::translate(joint.axis * q));
}

ForwardKinematics forward_kinematics(const KinematicTree& tree, const SystemState& state) {
  tree.check_state(state);
  const int nb = tree.body_count();
  ForwardKinematics fk;
  fk.body_pose.resize(nb);
  fk.body_twist.resize(nb);
  fk.body_pose[0] = tree.base_pose();
  fk.body_twist[0] = SpatialMotion::zero();

  for (int i = 1; i < nb; ++i) {
    const int p = tree.parent(i);
    const JointSpec& j = tree.joint(i);
    const double q = state.q[i - 1];
    const double qd = state.qdot[i - 1];
    fk.body_pose[i] = compose(fk.body_pose[p], joint_transform(j, q));

    const Vec3 axis_w = fk.body_pose[i].rotation * j.axis;
    const Vec3 o_i = fk.body_pose[i].translation;
    const Vec3 o_p = fk.body_pose[p].translation;
    Vec3 w = fk.body_twist[p].angular;
    Vec3 v = fk.body_twist[p].linear + fk.body_twist[p].angular.cross(o_i - o_p);
    if (j.kind == JointKind::Revolute)
      w += axis_w * qd;
    else
      v += axis_w * qd;
    fk.body_twist[i] = SpatialMotion(w, v);
  }
  return fk;
}

std::vector<Transform> forward_poses(const KinematicTree& tree, const VecX& q) {
  if (q.size() != tree.dof_count())
    throw std::invalid_argument("forward_poses: q dimension mismatch");
  const int nb = tree.body_count();
  std::vector<Transform> pose(nb);
  pose[0] = tree.base_pose();
  for (int i = 1; i < nb; ++i)
    pose[i] = compose(pose[tree.parent(i)], joint_transform(tree.joint(i), q[i - 1]));
  return pose;
}

FrameState ForwardKinematics::frame_state(int body, const Transform& local_pose) const {
  FrameState st;
  st.pose = compose(body_pose[body], local_pose);
  const Vec3 r = st.pose.translation - body_pose[body].translation;
  st.twist.angular = body_twist[body].angular;
  st.twist.linear = body_twist[body].linear + body_twist[body].angular.cross(r);
  return st;
}

FrameState ForwardKinematics::attachment_state(const KinematicTree& tree,
                                               const std::string& name) const {
  const AttachmentPoint& ap = tree.attachment(name);
  return frame_state(ap.body, ap.local_pose);
}

MatX point_jacobian(const KinematicTree& tree, const VecX& q, int body, const Vec3& local_point) {
  if (body < 0 || body >= tree.body_count())
    throw std::invalid_argument("point_jacobian: body index out of range");
  const auto pose = forward_poses(tree, q);
  const Vec3 p = pose[body].apply(local_point);

  MatX J = MatX::Zero(6, tree.dof_count());
  for (int i = body; i != 0; i = tree.parent(i)) {
    const JointSpec& j = tree.joint(i);
    const Vec3 axis_w = pose[i].rotation * j.axis;
    if (j.kind == JointKind::Revolute) {
      J.block<3, 1>(0, i - 1) = axis_w;
      J.block<3, 1>(3, i - 1) = axis_w.cross(p - pose[i].translation);
    } else {
      J.block<3, 1>(3, i - 1) = axis_w;
    }
  }
  return J;
}

MatX point_jacobian(const KinematicTree& tree, const VecX& q, const std::string& attachment) {
  const AttachmentPoint& ap = tree.attachment(attachment);
  return point_jacobian(tree, q, ap.body, ap.local_pose.translation);
}

// ---------------------------------------------------------------------------
// Anthropometrics
// ---------------------------------------------------------------------------

void Anthropometrics::validate() const {
  auto check = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      std::ostringstream os;
      os << "anthropometrics: " << what << " must be strictly positive, got " << v;
      throw std::invalid_argument(os.str());
    }
  };
  check(thigh_length, "thigh_length");
  check(shank_length, "shank_length");
  check(foot_length, "foot_length");
  check(pelvis_width, "pelvis_width");
  check(thigh_mass, "thigh_mass");
  check(shank_mass, "shank_mass");
  check(foot_mass, "foot_mass");
  check(pelvis_mass, "pelvis_mass");
}

Anthropometrics anthropometrics_percentile(const std::string& label) {
  // Segment lengths from stature proportions, masses from body-mass fractions;
  // stand-in table, replaceable via anthropometrics JSON files.
  Anthropometrics a;
  double stature, body_mass;
  if (label == "p2.5" || label == "2.5") {
    stature = 1.63;
    body_mass = 56.0;
  } else if (label == "p50" || label == "50") {
    stature = 1.755;
    body_mass = 75.0;
  } else if (label == "p97.5" || label == "97.5") {
    stature = 1.88;
    body_mass = 98.0;
  } else {
    throw std::invalid_argument("unknown anthropometric percentile '" + label +
                                "' (expected p2.5, p50 or p97.5)");
  }
  a.thigh_length = 0.245 * stature;
  a.shank_length = 0.246 * stature;
  a.foot_length = 0.152 * stature;
  a.pelvis_width = 0.191 * stature;
  a.thigh_mass = 0.100 * body_mass;
  a.shank_mass = 0.0465 * body_mass;
  a.foot_mass = 0.0145 * body_mass;
  a.pelvis_mass = 0.142 * body_mass;
  a.percentile = label;
  return a;
}

// ---------------------------------------------------------------------------
// Shared geometry helpers
// ---------------------------------------------------------------------------

namespace {

// Anatomical joint axes, descending convention (parent = proximal segment).
// Flexion axes are chosen so positive coordinates move limbs the physiological
// way at each articulation; ascending (stance-leg) joints negate the axis and
// reverse the in-cluster order so coordinates keep their anatomical meaning.
const Vec3 kHipFlexAxis(0, -1, 0);
const Vec3 kKneeFlexAxis(0, 1, 0);
const Vec3 kAnkleFlexAxis(0, -1, 0);
const Vec3 kAbdAxis(1, 0, 0);
const Vec3 kRotAxis(0, 0, 1);

// Attachment-frame orientation for thigh/shank interfaces: z along the limb
// (down), y sagittal-normal, x horizontal in the sagittal plane.
Mat3 limb_attachment_axes() {
  Mat3 r;
  r.col(0) = Vec3(1, 0, 0);
  r.col(1) = Vec3(0, -1, 0);
  r.col(2) = Vec3(0, 0, -1);
  return r;
}

// Foot interfaces: z along the foot (forward), y sagittal-normal, x vertical.
Mat3 foot_attachment_axes() {
  Mat3 r;
  r.col(0) = Vec3(0, 0, 1);
  r.col(1) = Vec3(0, -1, 0);
  r.col(2) = Vec3(1, 0, 0);
  return r;
}

Mat3 rod_inertia(double mass, double length, double radius) {
  const double it = mass * (3.0 * radius * radius + length * length) / 12.0;
  const double ia = 0.5 * mass * radius * radius;
  return Vec3(it, it, ia).asDiagonal();
}

Mat3 box_inertia(double mass, const Vec3& dims) {
  const double c = mass / 12.0;
  return Vec3(c * (dims.y() * dims.y() + dims.z() * dims.z()),
              c * (dims.x() * dims.x() + dims.z() * dims.z()),
              c * (dims.x() * dims.x() + dims.y() * dims.y()))
      .asDiagonal();
}

struct Landmarks {
  double hip_z, knee_z, ankle_z;
  double half_width;  // hip centerline to leg centerline
  Vec3 thigh_attach_r, shank_attach_r, foot_attach_r;
  Vec3 thigh_attach_l, shank_attach_l, foot_attach_l;
  Vec3 sacrum;

  Vec3 attach(int interface) const {
    switch (interface) {
      case kThighR: return thigh_attach_r;
      case kShankR: return shank_attach_r;
      case kFootR: return foot_attach_r;
      case kThighL: return thigh_attach_l;
      case kShankL: return shank_attach_l;
      case kFootL: return foot_attach_l;
      default: return sacrum;
    }
  }
};

Landmarks compute_landmarks(const Anthropometrics& a, double thigh_frac, double shank_frac) {
  Landmarks lm;
  const double ha = a.ankle_height();
  lm.ankle_z = ha;
  lm.knee_z = ha + a.shank_length;
  lm.hip_z = lm.knee_z + a.thigh_length;
  lm.half_width = 0.5 * a.pelvis_width;

  const double ty = lm.half_width;
  lm.thigh_attach_r = Vec3(0, -ty, lm.hip_z - thigh_frac * a.thigh_length);
  lm.thigh_attach_l = Vec3(0, ty, lm.hip_z - thigh_frac * a.thigh_length);
  lm.shank_attach_r = Vec3(0, -ty, lm.knee_z - shank_frac * a.shank_length);
  lm.shank_attach_l = Vec3(0, ty, lm.knee_z - shank_frac * a.shank_length);
  lm.foot_attach_r = Vec3(0.4 * a.foot_length, -ty, 0.5 * ha);
  lm.foot_attach_l = Vec3(0.4 * a.foot_length, ty, 0.5 * ha);
  lm.sacrum = Vec3(-0.3 * a.pelvis_width, 0, lm.hip_z);
  return lm;
}

}  // namespace

// ---------------------------------------------------------------------------
// Exoskeleton builder
// ---------------------------------------------------------------------------

ExoskeletonModel build_exoskeleton(const Anthropometrics& anthro, const ExoBuildOptions& opt) {
  anthro.validate();
  if (!(opt.total_mass > 0.0)) throw std::invalid_argument("build_exoskeleton: total_mass must be > 0");
  if (opt.cuff_mass < 0.0) throw std::invalid_argument("build_exoskeleton: cuff_mass must be >= 0");

  const Landmarks lm = compute_landmarks(anthro, opt.thigh_attach_fraction, opt.shank_attach_fraction);
  const double leg_y = lm.half_width + opt.lateral_offset;  // exoskeleton leg centerline offset
  const double ha = anthro.ankle_height();

  // Mass apportioning: cuffs take their share off the top, links split the
  // rest proportional to segment length (overridable).
  const double cuff_total = 6.0 * opt.cuff_mass;
  if (cuff_total >= opt.total_mass)
    throw std::invalid_argument("build_exoskeleton: cuff masses exceed the total mass budget");
  std::array<double, 4> frac = opt.mass_fractions.value_or(std::array<double, 4>{
      anthro.foot_length, anthro.shank_length, anthro.thigh_length, anthro.pelvis_width});
  const double fsum = 2 * frac[0] + 2 * frac[1] + 2 * frac[2] + frac[3];
  const double link_budget = opt.total_mass - cuff_total;
  const double m_foot = link_budget * frac[0] / fsum;
  const double m_shank = link_budget * frac[1] / fsum;
  const double m_thigh = link_budget * frac[2] / fsum;
  const double m_pelvis = link_budget * frac[3] / fsum;

  const double rod_r = 0.04;

  SpatialInertia foot_inertia(m_foot, Vec3(0.2 * anthro.foot_length, 0, -0.5 * ha),
                              box_inertia(m_foot, Vec3(anthro.foot_length, 0.08, ha)));

  ExoskeletonModel model{
      KinematicTree("foot_r", Transform::translate(Vec3(0, -leg_y, lm.ankle_z)), foot_inertia),
      {}, {}, {}, anthro, opt};
  KinematicTree& tree = model.tree;

  // --- right leg, ascending (stance side) ---
  JointSpec ankle_r{"ankle_r", JointKind::Revolute, -kAnkleFlexAxis, Transform::identity(), -0.9, 0.9};
  BodySpec shank_r{"shank_r",
                   SpatialInertia(m_shank, Vec3(0, 0, 0.5 * anthro.shank_length),
                                  rod_inertia(m_shank, anthro.shank_length, rod_r))};
  const int b_shank_r = tree.add_body(0, ankle_r, shank_r);

  JointSpec knee_r{"knee_r", JointKind::Revolute, -kKneeFlexAxis,
                   Transform::translate(Vec3(0, 0, anthro.shank_length)), -0.1, 2.2};
  BodySpec thigh_r{"thigh_r",
                   SpatialInertia(m_thigh, Vec3(0, 0, 0.5 * anthro.thigh_length),
                                  rod_inertia(m_thigh, anthro.thigh_length, rod_r))};
  const int b_thigh_r = tree.add_body(b_shank_r, knee_r, thigh_r);

  const double hip_span = 2.0 * leg_y;  // right exo hip to left exo hip
  JointSpec hip_r{"hip_r", JointKind::Revolute, -kHipFlexAxis,
                  Transform::translate(Vec3(0, 0, anthro.thigh_length)), -0.8, 2.0};
  BodySpec pelvis{"pelvis",
                  SpatialInertia(m_pelvis, Vec3(0, 0.5 * hip_span, 0),
                                 box_inertia(m_pelvis, Vec3(0.25 * anthro.pelvis_width, hip_span, 0.15)))};
  const int b_pelvis = tree.add_body(b_thigh_r, hip_r, pelvis);

  // --- left leg, descending (swing side) ---
  JointSpec hip_l{"hip_l", JointKind::Revolute, kHipFlexAxis,
                  Transform::translate(Vec3(0, hip_span, 0)), -0.8, 2.0};
  BodySpec thigh_l{"thigh_l",
                   SpatialInertia(m_thigh, Vec3(0, 0, -0.5 * anthro.thigh_length),
                                  rod_inertia(m_thigh, anthro.thigh_length, rod_r))};
  const int b_thigh_l = tree.add_body(b_pelvis, hip_l, thigh_l);

  JointSpec knee_l{"knee_l", JointKind::Revolute, kKneeFlexAxis,
                   Transform::translate(Vec3(0, 0, -anthro.thigh_length)), -0.1, 2.2};
  BodySpec shank_l{"shank_l",
                   SpatialInertia(m_shank, Vec3(0, 0, -0.5 * anthro.shank_length),
                                  rod_inertia(m_shank, anthro.shank_length, rod_r))};
  const int b_shank_l = tree.add_body(b_thigh_l, knee_l, shank_l);

  JointSpec ankle_l{"ankle_l", JointKind::Revolute, kAnkleFlexAxis,
                    Transform::translate(Vec3(0, 0, -anthro.shank_length)), -0.9, 0.9};
  BodySpec foot_l{"foot_l", foot_inertia};
  const int b_foot_l = tree.add_body(b_shank_l, ankle_l, foot_l);

  model.anatomical_dofs = {tree.dof_index("hip_r"), tree.dof_index("knee_r"),
                           tree.dof_index("ankle_r"), tree.dof_index("hip_l"),
                           tree.dof_index("knee_l"), tree.dof_index("ankle_l")};
  model.actuated_dofs = {tree.dof_index("hip_r"), tree.dof_index("knee_r"),
                         tree.dof_index("hip_l"), tree.dof_index("knee_l")};

  // --- harness chains ---
  // All six chain joints are co-located at the cuff's home position, which
  // coincides with the human attachment point so that the home configuration
  // has zero interface mismatch.
  const auto home_pose = forward_poses(tree, VecX::Zero(tree.dof_count()));
  const std::array<int, 6> mount_body = {b_thigh_r, b_shank_r, 0, b_thigh_l, b_shank_l, b_foot_l};

  const Mat3 limb_axes = limb_attachment_axes();
  const Mat3 foot_axes = foot_attachment_axes();

  for (int iface = 0; iface < kNumOptimizedInterfaces; ++iface) {
    const std::string& name = kInterfaceNames[iface];
    const bool is_foot = (iface == kFootR || iface == kFootL);
    const Mat3& axes = is_foot ? foot_axes : limb_axes;
    const Transform harness_world(Rotation::from_matrix(axes), lm.attach(iface));
    const Transform mount_local = compose(inverse(home_pose[mount_body[iface]]), harness_world);

    InterfaceInfo info;
    info.name = name;
    info.has_chain = true;
    int parent = mount_body[iface];
    for (int d = 0; d < kHarnessDofs; ++d) {
      JointSpec js;
      js.name = "harness_" + name + "_" + kHarnessDofNames[d];
      js.kind = d < 3 ? JointKind::Prismatic : JointKind::Revolute;
      js.axis = Vec3::Unit(d % 3);
      js.parent_attachment = (d == 0) ? mount_local : Transform::identity();
      js.lower_limit = d < 3 ? -0.3 : -1.5;
      js.upper_limit = d < 3 ? 0.3 : 1.5;
      js.armature = opt.harness_armature;

      BodySpec bs;
      bs.name = "harness_" + name + "_link" + std::to_string(d);
      if (d == kHarnessDofs - 1 && opt.cuff_mass > 0.0) {
        bs.name = "cuff_" + name;
        const double rg2 = opt.cuff_gyration_radius * opt.cuff_gyration_radius;
        bs.inertia = SpatialInertia(opt.cuff_mass, Vec3::Zero(),
                                    Mat3(opt.cuff_mass * rg2 * Mat3::Identity()));
      } else if (d == kHarnessDofs - 1) {
        bs.name = "cuff_" + name;
      }
      parent = tree.add_body(parent, js, bs);
      info.harness_dof[d] = tree.dof_index(js.name);
    }
    info.endpoint_body = parent;
    info.exo_attachment = "exo_" + name;
    tree.add_attachment(info.exo_attachment, parent, Transform::identity());
    model.interfaces[iface] = info;
  }

  // Pelvis interface: direct impedance, no chain. The attachment sits at the
  // wearer's sacrum home position.
  InterfaceInfo pelvis_info;
  pelvis_info.name = kInterfaceNames[kPelvis];
  pelvis_info.has_chain = false;
  pelvis_info.endpoint_body = b_pelvis;
  pelvis_info.exo_attachment = "exo_pelvis";
  const Transform sacrum_world(Rotation::identity(), lm.sacrum);
  tree.add_attachment("exo_pelvis", b_pelvis, compose(inverse(home_pose[b_pelvis]), sacrum_world));
  model.interfaces[kPelvis] = pelvis_info;

  if (tree.dof_count() != 42)
    throw std::logic_error("build_exoskeleton: expected 42 DoFs, got " +
                           std::to_string(tree.dof_count()));
  return model;
}

// ---------------------------------------------------------------------------
// Human builder
// ---------------------------------------------------------------------------

namespace {

struct ClusterAxes {
  Vec3 flex, abd, rot;
};

}  // namespace

HumanModel build_human(const Anthropometrics& anthro) {
  anthro.validate();
  const Landmarks lm = compute_landmarks(anthro, 0.5, 0.5);

  // Cluster bodies are massless connectors; segment masses sit on the named
  // segment bodies (the human is a kinematic driver, masses are reference only).
  auto connector = [](const std::string& name) {
    BodySpec b;
    b.name = name;
    return b;
  };
  auto segment = [&](const std::string& name, double mass, const Vec3& com, double length) {
    BodySpec b;
    b.name = name;
    b.inertia = SpatialInertia(mass, com, rod_inertia(mass, length, 0.05));
    return b;
  };
  auto rev = [](const std::string& name, const Vec3& axis, const Transform& att) {
    JointSpec j;
    j.name = name;
    j.kind = JointKind::Revolute;
    j.axis = axis;
    j.parent_attachment = att;
    return j;
  };

  const ClusterAxes hip{kHipFlexAxis, kAbdAxis, kRotAxis};
  const ClusterAxes knee{kKneeFlexAxis, kAbdAxis, kRotAxis};
  const ClusterAxes ankle{kAnkleFlexAxis, kAbdAxis, kRotAxis};

  SpatialInertia foot_inertia(anthro.foot_mass, Vec3(0.2 * anthro.foot_length, 0, -0.5 * lm.ankle_z),
                              box_inertia(anthro.foot_mass, Vec3(anthro.foot_length, 0.08, lm.ankle_z)));
  HumanModel model{KinematicTree("h_foot_r", Transform::translate(Vec3(0, -lm.half_width, lm.ankle_z)),
                                 foot_inertia),
                   {}, anthro};
  KinematicTree& tree = model.tree;

  // Right leg ascends from the grounded foot: negated axes, reversed cluster
  // order, so every coordinate keeps its anatomical (descending) meaning.
  int b = 0;
  b = tree.add_body(b, rev("ankle_rot_r", -ankle.rot, Transform::identity()), connector("h_ankle_c1_r"));
  b = tree.add_body(b, rev("ankle_inv_r", -ankle.abd, Transform::identity()), connector("h_ankle_c2_r"));
  b = tree.add_body(b, rev("ankle_flex_r", -ankle.flex, Transform::identity()),
                    segment("h_shank_r", anthro.shank_mass, Vec3(0, 0, 0.5 * anthro.shank_length),
                            anthro.shank_length));
  const int b_shank_r = b;
  b = tree.add_body(b, rev("knee_rot_r", -knee.rot, Transform::translate(Vec3(0, 0, anthro.shank_length))),
                    connector("h_knee_c1_r"));
  b = tree.add_body(b, rev("knee_abd_r", -knee.abd, Transform::identity()), connector("h_knee_c2_r"));
  b = tree.add_body(b, rev("knee_flex_r", -knee.flex, Transform::identity()),
                    segment("h_thigh_r", anthro.thigh_mass, Vec3(0, 0, 0.5 * anthro.thigh_length),
                            anthro.thigh_length));
  const int b_thigh_r = b;
  b = tree.add_body(b, rev("hip_rot_r", -hip.rot, Transform::translate(Vec3(0, 0, anthro.thigh_length))),
                    connector("h_hip_c1_r"));
  b = tree.add_body(b, rev("hip_abd_r", -hip.abd, Transform::identity()), connector("h_hip_c2_r"));
  b = tree.add_body(b, rev("hip_flex_r", -hip.flex, Transform::identity()),
                    segment("h_pelvis", anthro.pelvis_mass, Vec3(0, lm.half_width, 0),
                            anthro.pelvis_width));
  const int b_pelvis = b;

  // Left leg descends normally.
  b = tree.add_body(b_pelvis, rev("hip_flex_l", hip.flex, Transform::translate(Vec3(0, anthro.pelvis_width, 0))),
                    connector("h_hip_c1_l"));
  b = tree.add_body(b, rev("hip_abd_l", hip.abd, Transform::identity()), connector("h_hip_c2_l"));
  b = tree.add_body(b, rev("hip_rot_l", hip.rot, Transform::identity()),
                    segment("h_thigh_l", anthro.thigh_mass, Vec3(0, 0, -0.5 * anthro.thigh_length),
                            anthro.thigh_length));
  const int b_thigh_l = b;
  b = tree.add_body(b, rev("knee_flex_l", knee.flex, Transform::translate(Vec3(0, 0, -anthro.thigh_length))),
                    connector("h_knee_c1_l"));
  b = tree.add_body(b, rev("knee_abd_l", knee.abd, Transform::identity()), connector("h_knee_c2_l"));
  b = tree.add_body(b, rev("knee_rot_l", knee.rot, Transform::identity()),
                    segment("h_shank_l", anthro.shank_mass, Vec3(0, 0, -0.5 * anthro.shank_length),
                            anthro.shank_length));
  const int b_shank_l = b;
  b = tree.add_body(b, rev("ankle_flex_l", ankle.flex, Transform::translate(Vec3(0, 0, -anthro.shank_length))),
                    connector("h_ankle_c1_l"));
  b = tree.add_body(b, rev("ankle_inv_l", ankle.abd, Transform::identity()), connector("h_ankle_c2_l"));
  b = tree.add_body(b, rev("ankle_rot_l", ankle.rot, Transform::identity()),
                    BodySpec{"h_foot_l", foot_inertia});
  const int b_foot_l = b;

  if (tree.dof_count() != kGaitChannels)
    throw std::logic_error("build_human: expected 18 DoFs");

  // Attachment frames, aligned with the harness frames at home.
  const Mat3 limb_axes = limb_attachment_axes();
  const Mat3 foot_axes = foot_attachment_axes();
  const auto home_pose = forward_poses(tree, VecX::Zero(tree.dof_count()));
  const std::array<int, kNumInterfaces> att_body = {b_thigh_r, b_shank_r, 0,       b_thigh_l,
                                                    b_shank_l, b_foot_l,  b_pelvis};
  for (int iface = 0; iface < kNumInterfaces; ++iface) {
    const bool is_foot = (iface == kFootR || iface == kFootL);
    const Mat3& axes = (iface == kPelvis) ? Mat3(Mat3::Identity()) : (is_foot ? foot_axes : limb_axes);
    const Transform world(Rotation::from_matrix(axes), lm.attach(iface));
    const std::string name = "h_" + kInterfaceNames[iface];
    tree.add_attachment(name, att_body[iface], compose(inverse(home_pose[att_body[iface]]), world));
    model.attachment[iface] = name;
  }
  return model;
}

std::array<int, kGaitChannels> human_channel_dofs(const HumanModel& human) {
  std::array<int, kGaitChannels> dofs{};
  for (int c = 0; c < kGaitChannels; ++c) dofs[c] = human.tree.dof_index(kGaitChannelNames[c]);
  return dofs;
}

std::array<std::pair<int, int>, 6> exo_anatomical_channel_pairs(const ExoskeletonModel& exo,
                                                                const HumanModel& human) {
  auto channel = [](const std::string& name) {
    for (int c = 0; c < kGaitChannels; ++c)
      if (kGaitChannelNames[c] == name) return c;
    throw std::logic_error("unknown gait channel " + name);
  };
  return {{{exo.tree.dof_index("hip_r"), channel("hip_flex_r")},
           {exo.tree.dof_index("knee_r"), channel("knee_flex_r")},
           {exo.tree.dof_index("ankle_r"), channel("ankle_flex_r")},
           {exo.tree.dof_index("hip_l"), channel("hip_flex_l")},
           {exo.tree.dof_index("knee_l"), channel("knee_flex_l")},
           {exo.tree.dof_index("ankle_l"), channel("ankle_flex_l")}}};
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

namespace {

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json transform_to_json(const Transform& t) {
  const auto& q = t.rotation.quaternion();
  return json{{"quaternion", {q.w(), q.x(), q.y(), q.z()}}, {"translation", vec3_to_json(t.translation)}};
}

Transform transform_from_json(const json& j) {
  const auto& q = j.at("quaternion");
  return Transform(Rotation(Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(),
                                               q[2].get<double>(), q[3].get<double>())),
                   vec3_from_json(j.at("translation")));
}

json anthro_to_json(const Anthropometrics& a) {
  return json{{"thigh_length", a.thigh_length}, {"shank_length", a.shank_length},
              {"foot_length", a.foot_length},   {"pelvis_width", a.pelvis_width},
              {"thigh_mass", a.thigh_mass},     {"shank_mass", a.shank_mass},
              {"foot_mass", a.foot_mass},       {"pelvis_mass", a.pelvis_mass},
              {"percentile", a.percentile}};
}

Anthropometrics anthro_from_json(const json& j) {
  Anthropometrics a;
  a.thigh_length = j.at("thigh_length").get<double>();
  a.shank_length = j.at("shank_length").get<double>();
  a.foot_length = j.at("foot_length").get<double>();
  a.pelvis_width = j.at("pelvis_width").get<double>();
  a.thigh_mass = j.value("thigh_mass", a.thigh_mass);
  a.shank_mass = j.value("shank_mass", a.shank_mass);
  a.foot_mass = j.value("foot_mass", a.foot_mass);
  a.pelvis_mass = j.value("pelvis_mass", a.pelvis_mass);
  a.percentile = j.value("percentile", std::string("custom"));
  a.validate();
  return a;
}

constexpr int kModelFormatVersion = 1;

}  // namespace

void save_model(const ExoskeletonModel& model, const std::string& path) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "exoskeleton_model";
  j["anthropometrics"] = anthro_to_json(model.anthro);
  json opt;
  opt["total_mass"] = model.options.total_mass;
  opt["cuff_mass"] = model.options.cuff_mass;
  opt["cuff_gyration_radius"] = model.options.cuff_gyration_radius;
  opt["lateral_offset"] = model.options.lateral_offset;
  opt["harness_armature"] = model.options.harness_armature;
  opt["thigh_attach_fraction"] = model.options.thigh_attach_fraction;
  opt["shank_attach_fraction"] = model.options.shank_attach_fraction;
  if (model.options.mass_fractions) opt["mass_fractions"] = *model.options.mass_fractions;
  j["build_options"] = opt;

  // The built tree is also embedded for inspection and validation.
  json bodies = json::array();
  for (int i = 0; i < model.tree.body_count(); ++i) {
    const auto& b = model.tree.body(i);
    bodies.push_back(json{{"name", b.name},
                          {"mass", b.inertia.mass},
                          {"com", vec3_to_json(b.inertia.com)},
                          {"parent", model.tree.parent(i)}});
  }
  j["bodies"] = bodies;
  json joints = json::array();
  for (int i = 1; i < model.tree.body_count(); ++i) {
    const auto& js = model.tree.joint(i);
    joints.push_back(json{{"name", js.name},
                          {"kind", js.kind == JointKind::Revolute ? "revolute" : "prismatic"},
                          {"axis", vec3_to_json(js.axis)},
                          {"parent_attachment", transform_to_json(js.parent_attachment)},
                          {"limits", {js.lower_limit, js.upper_limit}},
                          {"armature", js.armature}});
  }
  j["joints"] = joints;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
}

ExoskeletonModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_model: '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.contains("format_version"))
    throw std::runtime_error("load_model: '" + path + "' is missing format_version");
  const int ver = j["format_version"].get<int>();
  if (ver != kModelFormatVersion)
    throw std::runtime_error("load_model: unsupported format_version " + std::to_string(ver));
  if (j.value("kind", "") != std::string("exoskeleton_model"))
    throw std::runtime_error("load_model: '" + path + "' is not an exoskeleton model file");

  const Anthropometrics anthro = anthro_from_json(j.at("anthropometrics"));
  ExoBuildOptions opt;
  if (j.contains("build_options")) {
    const json& o = j["build_options"];
    opt.total_mass = o.value("total_mass", opt.total_mass);
    opt.cuff_mass = o.value("cuff_mass", opt.cuff_mass);
    opt.cuff_gyration_radius = o.value("cuff_gyration_radius", opt.cuff_gyration_radius);
    opt.lateral_offset = o.value("lateral_offset", opt.lateral_offset);
    opt.harness_armature = o.value("harness_armature", opt.harness_armature);
    opt.thigh_attach_fraction = o.value("thigh_attach_fraction", opt.thigh_attach_fraction);
    opt.shank_attach_fraction = o.value("shank_attach_fraction", opt.shank_attach_fraction);
    if (o.contains("mass_fractions")) {
      auto v = o["mass_fractions"].get<std::vector<double>>();
      if (v.size() != 4) throw std::runtime_error("load_model: mass_fractions must have 4 entries");
      opt.mass_fractions = std::array<double, 4>{v[0], v[1], v[2], v[3]};
    }
  }
  ExoskeletonModel model = build_exoskeleton(anthro, opt);

  // Cross-check the embedded tree against the rebuilt one.
  if (j.contains("bodies") && j["bodies"].size() != static_cast<size_t>(model.tree.body_count()))
    throw std::runtime_error("load_model: embedded body list does not match the build options");
  return model;
}

Anthropometrics load_anthropometrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_anthropometrics: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_anthropometrics: '" + path + "' is not valid JSON: " + e.what());
  }
  return anthro_from_json(j);
}

void save_anthropometrics(const Anthropometrics& a, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_anthropometrics: cannot open '" + path + "'");
  out << anthro_to_json(a).dump(2) << "\n";
}

}  // namespace exosim
