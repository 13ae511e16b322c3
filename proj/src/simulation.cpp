#include "exosim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "exosim/random.hpp"

namespace exosim {

void EpisodeSpec::validate() const {
  if (!exo || !human) throw std::invalid_argument("episode spec: models must be set");
  if (!(dt > 0.0)) throw std::invalid_argument("episode spec: dt must be > 0");
  if (transient_discard < 0.0 || transient_discard > 0.9)
    throw std::invalid_argument("episode spec: transient_discard must lie in [0, 0.9]");
  if (!(gamma >= 0.0)) throw std::invalid_argument("episode spec: gamma must be >= 0");
  harness.validate();
  for (const auto& imp : impedance) imp.validate();
  window.validate();
  gait.validate();
}

int SimulationTrace::retained_start() const {
  const int n = sample_count();
  if (n < 2) return 0;
  const double t_end = times[n - 1];
  const double cutoff = transient_discard * t_end;
  int k = 0;
  while (k < n - 1 && times[k] < cutoff) ++k;
  return k;
}

namespace {

struct InterfaceRuntime {
  int endpoint_body = -1;
  Transform attachment_local;      // exo-side attachment in the endpoint body frame
  int human_attachment_index = -1; // index into the human tree's attachment list
  bool active = true;              // false when the interface is detached
};

// Everything resolved once per episode; compute_forces is the per-stage hot path.
struct EpisodeContext {
  const EpisodeSpec* spec = nullptr;
  const KinematicTree* tree = nullptr;
  const KinematicTree* human_tree = nullptr;
  GaitSpline spline;
  std::array<int, kGaitChannels> human_dofs{};
  std::array<InterfaceRuntime, kNumInterfaces> iface{};
  std::array<LockParams, kNumOptimizedInterfaces> lock{};
  double t_max = 0.0;

  explicit EpisodeContext(const GaitTrajectory& sliced) : spline(sliced) {}

  struct Record {
    std::array<Vec6, kNumInterfaces> wrench;
    std::array<Vec3, kNumInterfaces> distance;
    double power_interaction = 0.0;
    double power_actuation = 0.0;
    double power_lock = 0.0;
    double lock_energy = 0.0;
    int tie_breaks = 0;
  };

  std::array<FrameState, kNumInterfaces> human_states(double t) const {
    VecX cq, cqd;
    spline.evaluate(std::min(t, t_max), cq, cqd);
    SystemState hs = SystemState::zero(human_tree->dof_count());
    hs.time = t;
    for (int c = 0; c < kGaitChannels; ++c) {
      hs.q[human_dofs[c]] = cq[c];
      hs.qdot[human_dofs[c]] = cqd[c];
    }
    const ForwardKinematics fk = forward_kinematics(*human_tree, hs);
    std::array<FrameState, kNumInterfaces> out;
    for (int i = 0; i < kNumInterfaces; ++i) {
      const auto& ap = human_tree->attachments()[iface[i].human_attachment_index];
      out[i] = fk.frame_state(ap.body, ap.local_pose);
    }
    return out;
  }

  ForceInput compute_forces(const SystemState& s, Record* record) const {
    const int n = tree->dof_count();
    ForceInput in;
    in.lock_torques = VecX::Zero(n);

    const auto human = human_states(s.time);
    const ForwardKinematics fk = forward_kinematics(*tree, s);

    in.wrenches.reserve(kNumInterfaces);
    double p_int = 0.0;
    for (int i = 0; i < kNumInterfaces; ++i) {
      const FrameState exo_att = fk.frame_state(iface[i].endpoint_body, iface[i].attachment_local);
      const InteractionWrench w = interaction_wrench(spec->impedance[i], human[i], exo_att);

      if (!w.wrench.torque.isZero(0.0) || !w.wrench.force.isZero(0.0)) {
        ExternalWrench ew;
        ew.body = iface[i].endpoint_body;
        ew.point = iface[i].attachment_local.translation;
        ew.wrench = SpatialForce(exo_att.pose.rotation * w.wrench.torque,
                                 exo_att.pose.rotation * w.wrench.force);
        in.wrenches.push_back(ew);
      }

      if (record) {
        record->wrench[i] = w.wrench.vector();
        const Rotation r_inv = exo_att.pose.rotation.inverse();
        record->distance[i] =
            (r_inv * (human[i].pose.translation - exo_att.pose.translation)).cwiseAbs();
        p_int += w.wrench.torque.dot(r_inv * exo_att.twist.angular) +
                 w.wrench.force.dot(r_inv * exo_att.twist.linear);
        if (w.orientation_tie_break) ++record->tie_breaks;
      }
    }

    for (int i = 0; i < kNumOptimizedInterfaces; ++i) {
      const auto& dofs = spec->exo->interfaces[i].harness_dof;
      accumulate_lock_torques(lock[i], dofs, s.q, s.qdot, in.lock_torques);
    }

    in.tau = VecX::Zero(n);
    if (spec->actuation == ActuationPolicy::GravityCompensation) {
      const VecX g = bias_forces(*tree, s.q, VecX::Zero(n), spec->gravity);
      for (int d : spec->exo->actuated_dofs) in.tau[d] = g[d];
    }

    if (record) {
      record->power_interaction = p_int;
      record->power_actuation = in.tau.dot(s.qdot);
      record->power_lock = in.lock_torques.dot(s.qdot);
      double le = 0.0;
      for (int i = 0; i < kNumOptimizedInterfaces; ++i)
        le += lock_spring_energy(lock[i], spec->exo->interfaces[i].harness_dof, s.q);
      record->lock_energy = le;
    }
    return in;
  }
};

}  // namespace

SimulationTrace run_episode(const EpisodeSpec& spec) {
  spec.validate();
  const KinematicTree& tree = spec.exo->tree;
  const int n = tree.dof_count();

  GaitTrajectory sliced = slice_episode(spec.gait, spec.window);
  sliced = add_awgn(sliced, spec.snr_db, derive_seed(spec.seed, "gait-noise"));

  EpisodeContext ctx(sliced);
  ctx.spec = &spec;
  ctx.tree = &tree;
  ctx.human_tree = &spec.human->tree;
  ctx.human_dofs = human_channel_dofs(*spec.human);
  ctx.t_max = ctx.spline.t_max();
  for (int i = 0; i < kNumInterfaces; ++i) {
    const InterfaceInfo& info = spec.exo->interfaces[i];
    const AttachmentPoint& ap = tree.attachment(info.exo_attachment);
    ctx.iface[i].endpoint_body = ap.body;
    ctx.iface[i].attachment_local = ap.local_pose;
    const auto& h_atts = spec.human->tree.attachments();
    for (int k = 0; k < static_cast<int>(h_atts.size()); ++k)
      if (h_atts[k].name == spec.human->attachment[i]) ctx.iface[i].human_attachment_index = k;
    if (ctx.iface[i].human_attachment_index < 0)
      throw std::logic_error("run_episode: missing human attachment for " + info.name);
    if (i < kNumOptimizedInterfaces) ctx.iface[i].active = !spec.harness.detached_interface(i);
  }

  // Initial exoskeleton state: anatomical joints at the wearer's windowed
  // start pose, harness joints at rest, then the optional gamma offsets.
  VecX q0 = VecX::Zero(n);
  const auto pairs = exo_anatomical_channel_pairs(*spec.exo, *spec.human);
  const VecX start_channels = ctx.spline.value(0.0);
  for (const auto& [dof, ch] : pairs) q0[dof] = start_channels[ch];
  if (spec.gamma > 0.0) q0 = perturb_initial(q0, spec.gamma, derive_seed(spec.seed, "perturb"));

  // Lock gains: per-DoF inertias from the inertia-matrix diagonal at the
  // start pose, so the stability cap tracks the actual reflected inertia.
  const MatX B0 = mass_matrix(tree, q0);
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) {
    std::array<double, kHarnessDofs> inertia{};
    for (int d = 0; d < kHarnessDofs; ++d)
      inertia[d] = B0(spec.exo->interfaces[i].harness_dof[d], spec.exo->interfaces[i].harness_dof[d]);
    ctx.lock[i] =
        spec.harness.lock_params(interface_type(i), inertia, spec.dt, spec.stability_margin);
  }

  const double duration = sliced.duration();
  const int steps = std::max(1, static_cast<int>(std::floor(duration / spec.dt + 1e-9)));
  const int samples = steps + 1;

  SimulationTrace trace;
  trace.times = VecX::LinSpaced(samples, 0.0, spec.dt * steps);
  trace.exo_q.resize(n, samples);
  trace.exo_qdot.resize(n, samples);
  trace.tau.resize(n, samples);
  trace.human_channels.resize(kGaitChannels, samples);
  for (auto& w : trace.wrench) w.resize(6, samples);
  for (auto& d : trace.distance) d.resize(3, samples);
  trace.power_interaction.resize(samples);
  trace.power_actuation.resize(samples);
  trace.power_lock.resize(samples);
  trace.lock_energy.resize(samples);
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) trace.interface_active[i] = ctx.iface[i].active;
  trace.anatomical_pairs = pairs;
  trace.dt = spec.dt;
  trace.transient_discard = spec.transient_discard;

  SystemState s;
  s.q = q0;
  s.qdot = VecX::Zero(n);
  s.time = 0.0;

  ForcesCallback callback = [&ctx](const SystemState& state) {
    return ctx.compute_forces(state, nullptr);
  };

  int recorded = 0;
  for (int k = 0; k < samples; ++k) {
    EpisodeContext::Record rec;
    const ForceInput in = ctx.compute_forces(s, &rec);
    trace.exo_q.col(k) = s.q;
    trace.exo_qdot.col(k) = s.qdot;
    trace.tau.col(k) = in.tau;
    trace.human_channels.col(k) = ctx.spline.value(std::min(s.time, ctx.t_max));
    for (int i = 0; i < kNumInterfaces; ++i) {
      trace.wrench[i].col(k) = rec.wrench[i];
      trace.distance[i].col(k) = rec.distance[i];
    }
    trace.power_interaction[k] = rec.power_interaction;
    trace.power_actuation[k] = rec.power_actuation;
    trace.power_lock[k] = rec.power_lock;
    trace.lock_energy[k] = rec.lock_energy;
    trace.tie_break_events += rec.tie_breaks;
    recorded = k + 1;

    if (k == samples - 1) break;
    if (spec.clamp_exoskeleton) {
      s.time += spec.dt;
      continue;
    }
    try {
      s = integrate_step(tree, s, callback, spec.dt, spec.scheme, spec.gravity);
    } catch (const IntegrationDivergence& e) {
      trace.divergent = true;
      trace.truncation_time = e.last_state.time;
      break;
    } catch (const std::runtime_error&) {
      // Overflowed states can break the factorization mid-stage; same outcome.
      trace.divergent = true;
      trace.truncation_time = s.time;
      break;
    }
  }

  if (recorded < samples) {
    trace.times.conservativeResize(recorded);
    trace.exo_q.conservativeResize(n, recorded);
    trace.exo_qdot.conservativeResize(n, recorded);
    trace.tau.conservativeResize(n, recorded);
    trace.human_channels.conservativeResize(kGaitChannels, recorded);
    for (auto& w : trace.wrench) w.conservativeResize(6, recorded);
    for (auto& d : trace.distance) d.conservativeResize(3, recorded);
    trace.power_interaction.conservativeResize(recorded);
    trace.power_actuation.conservativeResize(recorded);
    trace.power_lock.conservativeResize(recorded);
    trace.lock_energy.conservativeResize(recorded);
  }
  return trace;
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

std::array<Vec6, kNumInterfaces> wrench_rms(const SimulationTrace& trace) {
  if (trace.divergent) throw std::runtime_error("wrench_rms: trace is divergent");
  const int k0 = trace.retained_start();
  const int m = trace.sample_count() - k0;
  if (m < 1) throw std::runtime_error("wrench_rms: empty retained window");
  std::array<Vec6, kNumInterfaces> out;
  for (int i = 0; i < kNumInterfaces; ++i) {
    Vec6 acc = Vec6::Zero();
    for (int k = k0; k < trace.sample_count(); ++k)
      acc += trace.wrench[i].col(k).cwiseAbs2();
    out[i] = (acc / m).cwiseSqrt();
  }
  return out;
}

namespace {

TrackingStats stats_of(std::vector<double>& v) {
  TrackingStats s;
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double idx = p * (v.size() - 1);
    const int lo = static_cast<int>(std::floor(idx));
    const int hi = std::min<int>(lo + 1, v.size() - 1);
    const double a = idx - lo;
    return (1.0 - a) * v[lo] + a * v[hi];
  };
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  s.min = v.front();
  s.max = v.back();
  return s;
}

}  // namespace

std::array<TrackingStats, 6> tracking_differences(const SimulationTrace& trace) {
  const int k0 = trace.retained_start();
  std::array<TrackingStats, 6> out;
  for (int j = 0; j < 6; ++j) {
    const auto [dof, ch] = trace.anatomical_pairs[j];
    std::vector<double> diffs;
    diffs.reserve(trace.sample_count() - k0);
    for (int k = k0; k < trace.sample_count(); ++k)
      diffs.push_back(trace.exo_q(dof, k) - trace.human_channels(ch, k));
    out[j] = stats_of(diffs);
  }
  return out;
}

VecX uniform_threshold(double d_th_meters) {
  return VecX::Constant(3 * kNumOptimizedInterfaces, d_th_meters);
}

int constraint_value(const SimulationTrace& trace, const VecX& d_th) {
  if (d_th.size() != 3 * kNumOptimizedInterfaces)
    throw std::invalid_argument("constraint_value: d_th must have 18 entries");
  for (int i = 0; i < d_th.size(); ++i)
    if (!(d_th[i] > 0.0)) throw std::invalid_argument("constraint_value: thresholds must be > 0");

  const int k0 = trace.retained_start();
  int c = 0;
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) {
    if (!trace.interface_active[i]) continue;  // not connected: no tracking demand
    for (int k = k0; k < trace.sample_count(); ++k)
      for (int comp = 0; comp < 3; ++comp)
        if (trace.distance[i](comp, k) - d_th[3 * i + comp] >= 0.0) ++c;
  }
  return c;
}

double episode_cost(const SimulationTrace& trace, const VecX& w_weights) {
  if (w_weights.size() != 6 * kNumOptimizedInterfaces)
    throw std::invalid_argument("episode_cost: weight vector must have 36 entries");
  if (trace.divergent) return std::numeric_limits<double>::infinity();
  const int k0 = trace.retained_start();
  const int m = trace.sample_count() - k0;
  if (m < 1) return std::numeric_limits<double>::infinity();
  double acc = 0.0;
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) {
    const auto w = w_weights.segment<6>(6 * i);
    for (int k = k0; k < trace.sample_count(); ++k)
      acc += trace.wrench[i].col(k).cwiseAbs2().dot(w);
  }
  return acc / m;
}

EpisodeMetrics compute_metrics(const SimulationTrace& trace, const VecX& w_weights,
                               const VecX& d_th) {
  EpisodeMetrics out;
  out.divergent = trace.divergent;
  if (trace.divergent) {
    out.cost = std::numeric_limits<double>::infinity();
    out.feasible = false;
    for (auto& r : out.rms) r.setZero();
    return out;
  }
  out.rms = wrench_rms(trace);
  out.tracking = tracking_differences(trace);
  out.constraint_violations = constraint_value(trace, d_th);
  out.cost = episode_cost(trace, w_weights);
  out.feasible = out.constraint_violations == 0;
  return out;
}

// ---------------------------------------------------------------------------
// Trace export
// ---------------------------------------------------------------------------

void save_trace_csv(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_trace_csv: cannot open '" + path + "'");
  out.precision(17);

  out << "time";
  const std::array<std::string, 6> comp = {"mx", "my", "mz", "fx", "fy", "fz"};
  for (int i = 0; i < kNumInterfaces; ++i)
    for (const auto& c : comp) out << ",w_" << kInterfaceNames[i] << "_" << c;
  const std::array<std::string, 3> dcomp = {"dx", "dy", "dz"};
  for (int i = 0; i < kNumInterfaces; ++i)
    for (const auto& c : dcomp) out << ",dist_" << kInterfaceNames[i] << "_" << c;
  for (int c = 0; c < kGaitChannels; ++c) out << ",h_" << kGaitChannelNames[c];
  const int n = static_cast<int>(trace.exo_q.rows());
  for (int d = 0; d < n; ++d) out << ",q_" << d;
  for (int d = 0; d < n; ++d) out << ",qd_" << d;
  for (int d = 0; d < n; ++d) out << ",tau_" << d;
  out << "\n";

  for (int k = 0; k < trace.sample_count(); ++k) {
    out << trace.times[k];
    for (int i = 0; i < kNumInterfaces; ++i)
      for (int c = 0; c < 6; ++c) out << "," << trace.wrench[i](c, k);
    for (int i = 0; i < kNumInterfaces; ++i)
      for (int c = 0; c < 3; ++c) out << "," << trace.distance[i](c, k);
    for (int c = 0; c < kGaitChannels; ++c) out << "," << trace.human_channels(c, k);
    for (int d = 0; d < n; ++d) out << "," << trace.exo_q(d, k);
    for (int d = 0; d < n; ++d) out << "," << trace.exo_qdot(d, k);
    for (int d = 0; d < n; ++d) out << "," << trace.tau(d, k);
    out << "\n";
  }
}

namespace {

constexpr char kTraceMagic[8] = {'E', 'X', 'O', 'T', 'R', 'C', '0', '1'};

void write_matrix(std::ofstream& out, const MatX& m) {
  const std::int64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()), sizeof(double) * rows * cols);
}

MatX read_matrix(std::ifstream& in) {
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows < 0 || cols < 0 || rows > 1000000 || cols > 100000000)
    throw std::runtime_error("trace cache: corrupt matrix header");
  MatX m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()), sizeof(double) * rows * cols);
  if (!in) throw std::runtime_error("trace cache: truncated matrix data");
  return m;
}

}  // namespace

void save_trace_binary(const SimulationTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_trace_binary: cannot open '" + path + "'");
  out.write(kTraceMagic, sizeof(kTraceMagic));

  MatX scalars(1, static_cast<int>(trace.times.size()));
  scalars.row(0) = trace.times.transpose();
  write_matrix(out, scalars);
  write_matrix(out, trace.exo_q);
  write_matrix(out, trace.exo_qdot);
  write_matrix(out, trace.tau);
  write_matrix(out, trace.human_channels);
  for (const auto& w : trace.wrench) write_matrix(out, w);
  for (const auto& d : trace.distance) write_matrix(out, d);
  write_matrix(out, MatX(trace.power_interaction.transpose()));
  write_matrix(out, MatX(trace.power_actuation.transpose()));
  write_matrix(out, MatX(trace.power_lock.transpose()));
  write_matrix(out, MatX(trace.lock_energy.transpose()));

  MatX meta(1, 12 + 12);
  meta.setZero();
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) meta(0, i) = trace.interface_active[i] ? 1.0 : 0.0;
  meta(0, 6) = trace.dt;
  meta(0, 7) = trace.transient_discard;
  meta(0, 8) = trace.divergent ? 1.0 : 0.0;
  meta(0, 9) = trace.truncation_time;
  meta(0, 10) = trace.tie_break_events;
  for (int j = 0; j < 6; ++j) {
    meta(0, 12 + 2 * j) = trace.anatomical_pairs[j].first;
    meta(0, 12 + 2 * j + 1) = trace.anatomical_pairs[j].second;
  }
  write_matrix(out, meta);
}

SimulationTrace load_trace_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_trace_binary: cannot open '" + path + "'");
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kTraceMagic, sizeof(magic)) != 0)
    throw std::runtime_error("load_trace_binary: '" + path + "' is not a trace cache file");

  SimulationTrace t;
  t.times = read_matrix(in).row(0).transpose();
  t.exo_q = read_matrix(in);
  t.exo_qdot = read_matrix(in);
  t.tau = read_matrix(in);
  t.human_channels = read_matrix(in);
  for (auto& w : t.wrench) w = read_matrix(in);
  for (auto& d : t.distance) d = read_matrix(in);
  t.power_interaction = read_matrix(in).row(0).transpose();
  t.power_actuation = read_matrix(in).row(0).transpose();
  t.power_lock = read_matrix(in).row(0).transpose();
  t.lock_energy = read_matrix(in).row(0).transpose();

  const MatX meta = read_matrix(in);
  for (int i = 0; i < kNumOptimizedInterfaces; ++i) t.interface_active[i] = meta(0, i) != 0.0;
  t.dt = meta(0, 6);
  t.transient_discard = meta(0, 7);
  t.divergent = meta(0, 8) != 0.0;
  t.truncation_time = meta(0, 9);
  t.tie_break_events = static_cast<int>(meta(0, 10));
  for (int j = 0; j < 6; ++j)
    t.anatomical_pairs[j] = {static_cast<int>(meta(0, 12 + 2 * j)),
                             static_cast<int>(meta(0, 12 + 2 * j + 1))};
  return t;
}

// ---------------------------------------------------------------------------
// Fingerprint
// ---------------------------------------------------------------------------

namespace {

struct Hasher {
  std::uint64_t h = 1469598103934665603ull;
  void bytes(const void* p, size_t size) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (size_t i = 0; i < size; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  }
  void add(double v) { bytes(&v, sizeof(v)); }
  void add(std::uint64_t v) { bytes(&v, sizeof(v)); }
  void add(int v) { bytes(&v, sizeof(v)); }
  void add(bool v) { add(static_cast<int>(v)); }
  void add(const Vec3& v) {
    add(v.x());
    add(v.y());
    add(v.z());
  }
  void add(const std::string& s) { bytes(s.data(), s.size()); }
};

}  // namespace

std::uint64_t spec_fingerprint(const EpisodeSpec& spec) {
  Hasher h;
  const auto& a = spec.exo->anthro;
  h.add(a.thigh_length);
  h.add(a.shank_length);
  h.add(a.foot_length);
  h.add(a.pelvis_width);
  const auto& o = spec.exo->options;
  h.add(o.total_mass);
  h.add(o.cuff_mass);
  h.add(o.cuff_gyration_radius);
  h.add(o.lateral_offset);
  h.add(o.harness_armature);
  h.add(o.thigh_attach_fraction);
  h.add(o.shank_attach_fraction);

  h.add(spec.harness.code_string());
  for (const auto& mask : spec.harness.mask)
    for (bool b : mask) h.add(b);
  h.add(spec.harness.k_lock);
  h.add(spec.harness.d_lock_scale);

  for (const auto& imp : spec.impedance) {
    const auto f = imp.flat();
    for (int i = 0; i < 12; ++i) h.add(f[i]);
  }

  h.add(static_cast<int>(spec.actuation));
  h.add(static_cast<int>(spec.scheme));
  h.add(spec.dt);
  h.add(spec.transient_discard);
  h.add(spec.snr_db);
  h.add(spec.gamma);
  h.add(spec.seed);
  h.add(spec.stability_margin);
  h.add(spec.clamp_exoskeleton);
  h.add(spec.gravity);

  h.add(spec.window.stance_start);
  h.add(spec.window.stance_end);
  h.add(spec.window.swing_start);
  h.add(spec.window.swing_end);
  h.add(spec.gait.sample_rate);
  h.add(static_cast<int>(spec.gait.sample_count()));
  for (int i = 0; i < spec.gait.angles.size(); ++i) h.add(spec.gait.angles.data()[i]);
  return h.h;
}

}  // namespace exosim
