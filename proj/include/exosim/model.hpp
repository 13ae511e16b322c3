#pragma once

// Articulated-model layer: kinematic trees of revolute/prismatic joints,
// anthropometric scaling, and the builders for the exoskeleton (42 DoF,
// 3 sagittal joints per leg plus one 6-DoF harness chain per interface)
// and for the virtual wearer (18 DoF, three perpendicular revolute joints
// at each hip, knee and ankle).
//
// World frame: x forward (walking direction), y left, z up. Both trees are
// grounded at the right foot, which is the fixed base body (index 0).

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "exosim/spatial.hpp"

namespace exosim {

enum class JointKind { Revolute, Prismatic };

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::Revolute;
  Vec3 axis = Vec3::UnitZ();          // unit, in the joint (= child body) frame
  Transform parent_attachment;        // pose of the joint frame in the parent body frame, at q = 0
  double lower_limit = -1e9;          // metadata only, not enforced
  double upper_limit = 1e9;
  double armature = 0.0;              // extra reflected inertia on this DoF [kg or kg m^2]
};

struct AttachmentPoint {
  std::string name;
  int body = -1;
  Transform local_pose;  // pose of the attachment frame in the body frame
};

struct BodySpec {
  std::string name;
  SpatialInertia inertia;  // mass 0 allowed for massless connector links
};

struct SystemState {
  VecX q;
  VecX qdot;
  double time = 0.0;

  static SystemState zero(int n) {
    SystemState s;
    s.q = VecX::Zero(n);
    s.qdot = VecX::Zero(n);
    return s;
  }
};

/// Pose and twist of a body or attachment frame, world coordinates.
/// The twist's linear part is the velocity of the frame's own origin point.
struct FrameState {
  Transform pose;
  SpatialMotion twist;
};

class KinematicTree {
 public:
  /// Starts a tree whose base (body 0) is welded to the world at `base_pose`.
  explicit KinematicTree(const std::string& base_name, const Transform& base_pose,
                         const SpatialInertia& base_inertia = SpatialInertia::zero());

  /// Adds a body connected to `parent` through `joint`; returns the body index.
  int add_body(int parent, const JointSpec& joint, const BodySpec& body);

  void add_attachment(const std::string& name, int body, const Transform& local_pose);

  int body_count() const { return static_cast<int>(bodies_.size()); }
  int dof_count() const { return static_cast<int>(bodies_.size()) - 1; }

  const BodySpec& body(int i) const { return bodies_[i]; }
  const JointSpec& joint(int i) const { return joints_[i]; }  // i >= 1
  int parent(int i) const { return parent_[i]; }
  const Transform& base_pose() const { return base_pose_; }

  int body_index(const std::string& name) const;
  const AttachmentPoint& attachment(const std::string& name) const;
  bool has_attachment(const std::string& name) const { return attachment_index_.count(name) > 0; }
  const std::vector<AttachmentPoint>& attachments() const { return attachments_; }

  /// DoF index of the joint driving body i (= i - 1).
  int dof_of_body(int i) const { return i - 1; }
  const std::string& dof_name(int dof) const { return joints_[dof + 1].name; }
  int dof_index(const std::string& joint_name) const;

  double total_mass() const;

  void check_state(const SystemState& s) const;

 private:
  std::vector<BodySpec> bodies_;
  std::vector<JointSpec> joints_;  // joints_[0] is a placeholder for the base
  std::vector<int> parent_;        // parent_[i] < i; parent_[0] = -1
  std::vector<AttachmentPoint> attachments_;
  std::map<std::string, int> body_index_;
  std::map<std::string, int> attachment_index_;
  std::map<std::string, int> joint_index_;
  Transform base_pose_;
};

/// Pose of body i's frame in its parent's frame at joint coordinate q.
Transform joint_transform(const JointSpec& joint, double q);

struct ForwardKinematics {
  std::vector<Transform> body_pose;      // world pose per body
  std::vector<SpatialMotion> body_twist; // world twist per body (linear at body origin)

  FrameState attachment_state(const KinematicTree& tree, const std::string& name) const;
  FrameState frame_state(int body, const Transform& local_pose) const;
};

ForwardKinematics forward_kinematics(const KinematicTree& tree, const SystemState& state);

/// Position-only forward pass (no velocities required).
std::vector<Transform> forward_poses(const KinematicTree& tree, const VecX& q);

/// 6 x n Jacobian of an attachment frame: rows [angular; linear], world
/// coordinates, linear rows give the velocity of the attachment point.
MatX point_jacobian(const KinematicTree& tree, const VecX& q, int body, const Vec3& local_point);
MatX point_jacobian(const KinematicTree& tree, const VecX& q, const std::string& attachment);

// ---------------------------------------------------------------------------
// Anthropometrics and model builders
// ---------------------------------------------------------------------------

struct Anthropometrics {
  double thigh_length = 0.430;   // hip to knee [m]
  double shank_length = 0.432;   // knee to ankle [m]
  double foot_length = 0.267;    // [m]
  double pelvis_width = 0.335;   // hip to hip [m]
  double thigh_mass = 7.5;       // segment masses [kg]
  double shank_mass = 3.5;
  double foot_mass = 1.1;
  double pelvis_mass = 10.6;
  std::string percentile = "p50";

  void validate() const;
  /// Ankle joint height above ground, derived from foot size.
  double ankle_height() const { return 0.25 * foot_length; }
};

/// Canonical interface order used everywhere: the six optimized interfaces
/// first, the fixed pelvis interface last.
enum InterfaceId {
  kThighR = 0,
  kShankR = 1,
  kFootR = 2,
  kThighL = 3,
  kShankL = 4,
  kFootL = 5,
  kPelvis = 6,
};
inline constexpr int kNumInterfaces = 7;
inline constexpr int kNumOptimizedInterfaces = 6;
extern const std::array<std::string, kNumInterfaces> kInterfaceNames;

/// Canonical harness-chain DoF order: prismatic x, y, z then revolute x, y, z,
/// axes of the harness attachment frame (z = limb longitudinal axis,
/// y = lateral / sagittal-normal, x completes the right-handed frame).
inline constexpr int kHarnessDofs = 6;
extern const std::array<std::string, kHarnessDofs> kHarnessDofNames;

struct InterfaceInfo {
  std::string name;
  bool has_chain = true;                 // false for the pelvis interface
  int endpoint_body = -1;                // cuff body (or pelvis link)
  std::array<int, kHarnessDofs> harness_dof{-1, -1, -1, -1, -1, -1};  // tree DoF indices
  std::string exo_attachment;            // attachment frame on the exoskeleton side
};

struct ExoBuildOptions {
  double total_mass = 19.0;              // whole-device mass budget [kg]
  double cuff_mass = 0.25;               // per-harness endpoint mass [kg]; 0 = massless harness
  double cuff_gyration_radius = 0.08;    // cuff inertia = m r^2 on all axes [m]
  double lateral_offset = 0.07;          // exoskeleton links sit outside the leg [m]
  double harness_armature = 1e-4;        // per-harness-DoF regularization inertia
  double thigh_attach_fraction = 0.5;    // along the segment, 0 = proximal
  double shank_attach_fraction = 0.5;
  // Link mass fractions (feet, shanks, thighs, pelvis); defaults proportional
  // to segment length. Normalized internally; cuff masses come out of the
  // total before apportioning.
  std::optional<std::array<double, 4>> mass_fractions;
};

struct ExoskeletonModel {
  KinematicTree tree;
  std::array<InterfaceInfo, kNumInterfaces> interfaces;
  std::vector<int> actuated_dofs;  // hip and knee flexion, both legs
  std::vector<int> anatomical_dofs;  // hip, knee, ankle per leg (6)
  Anthropometrics anthro;
  ExoBuildOptions options;
};

struct HumanModel {
  KinematicTree tree;  // 18 DoF
  std::array<std::string, kNumInterfaces> attachment;  // human-side attachment per interface
  Anthropometrics anthro;
};

/// Builds the 42-DoF exoskeleton tree: per leg hip/knee/ankle sagittal
/// revolute joints plus a 6-joint harness chain at thigh, shank and foot;
/// grounded at the right foot.
ExoskeletonModel build_exoskeleton(const Anthropometrics& anthro, const ExoBuildOptions& options = {});

/// Builds the 18-DoF virtual-wearer tree, grounded at the right foot.
HumanModel build_human(const Anthropometrics& anthro);

/// The gait-channel vocabulary, in the order used by trajectory files and by
/// the human tree's DoFs.
inline constexpr int kGaitChannels = 18;
extern const std::array<std::string, kGaitChannels> kGaitChannelNames;

/// DoF indices of the human tree in gait-channel order.
std::array<int, kGaitChannels> human_channel_dofs(const HumanModel& human);

/// Maps each exoskeleton anatomical DoF to the gait channel it parallels
/// (hip/knee/ankle flexion per leg).
std::array<std::pair<int, int>, 6> exo_anatomical_channel_pairs(const ExoskeletonModel& exo,
                                                                const HumanModel& human);

// Model description file (JSON, format_version field).
void save_model(const ExoskeletonModel& model, const std::string& path);
ExoskeletonModel load_model(const std::string& path);

Anthropometrics load_anthropometrics(const std::string& path);
void save_anthropometrics(const Anthropometrics& a, const std::string& path);
/// Built-in percentile tables ("p2.5", "p50", "p97.5").
Anthropometrics anthropometrics_percentile(const std::string& label);

}  // namespace exosim
