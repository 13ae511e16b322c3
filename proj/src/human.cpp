#include "exosim/human.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "exosim/random.hpp"

namespace exosim {

void GaitTrajectory::validate() const {
  const int n = sample_count();
  if (n < 2) throw std::invalid_argument("gait trajectory: needs at least 2 samples");
  if (angles.rows() != kGaitChannels || angles.cols() != n)
    throw std::invalid_argument("gait trajectory: angle matrix shape mismatch");
  const double dt = times[1] - times[0];
  for (int i = 1; i < n; ++i) {
    const double step = times[i] - times[i - 1];
    if (!(step > 0.0))
      throw std::invalid_argument("gait trajectory: times not strictly increasing at sample " +
                                  std::to_string(i));
    if (std::abs(step - dt) > 1e-9 * std::max(1.0, dt))
      throw std::invalid_argument("gait trajectory: sampling not uniform at sample " +
                                  std::to_string(i));
  }
  if (!times.allFinite() || !angles.allFinite())
    throw std::invalid_argument("gait trajectory: non-finite values");
  if (!(sample_rate > 0.0)) throw std::invalid_argument("gait trajectory: sample_rate must be > 0");
}

// ---------------------------------------------------------------------------
// CSV ingestion
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) {
    // trim
    const auto b = field.find_first_not_of(" \t\r");
    const auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

GaitTrajectory resample_uniform(const VecX& times, const MatX& angles, double rate) {
  const int n = static_cast<int>(times.size());
  const double t0 = times[0], t1 = times[n - 1];
  const double dt = 1.0 / rate;
  const int m = std::max(2, static_cast<int>(std::floor((t1 - t0) / dt)) + 1);
  GaitTrajectory out;
  out.times = VecX::LinSpaced(m, 0.0, dt * (m - 1));
  out.angles.resize(kGaitChannels, m);
  out.sample_rate = rate;
  int k = 0;
  for (int i = 0; i < m; ++i) {
    const double t = t0 + out.times[i];
    while (k + 2 < n && times[k + 1] <= t) ++k;
    const double span = times[k + 1] - times[k];
    const double a = span > 0.0 ? std::clamp((t - times[k]) / span, 0.0, 1.0) : 0.0;
    out.angles.col(i) = (1.0 - a) * angles.col(k) + a * angles.col(k + 1);
  }
  return out;
}

}  // namespace

GaitTrajectory load_gait(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_gait: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_gait: '" + path + "' is empty");
  const auto header = split_csv_line(line);

  int time_col = -1;
  std::array<int, kGaitChannels> channel_col;
  channel_col.fill(-1);
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (header[c] == "time") {
      if (time_col >= 0) throw std::runtime_error("load_gait: duplicate time column");
      time_col = c;
      continue;
    }
    for (int k = 0; k < kGaitChannels; ++k) {
      if (header[c] == kGaitChannelNames[k]) {
        if (channel_col[k] >= 0)
          throw std::runtime_error("load_gait: duplicate channel '" + header[c] + "'");
        channel_col[k] = c;
      }
    }
  }
  if (time_col < 0) throw std::runtime_error("load_gait: '" + path + "' is missing the time column");
  for (int k = 0; k < kGaitChannels; ++k)
    if (channel_col[k] < 0)
      throw std::runtime_error("load_gait: '" + path + "' is missing channel '" +
                               kGaitChannelNames[k] + "'");

  std::vector<double> times;
  std::vector<std::array<double, kGaitChannels>> rows;
  int row_number = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (static_cast<int>(fields.size()) < static_cast<int>(header.size())) {
      throw std::runtime_error("load_gait: row " + std::to_string(row_number) + " has " +
                               std::to_string(fields.size()) + " fields, expected " +
                               std::to_string(header.size()));
    }
    auto parse = [&](int col, const std::string& what) {
      try {
        const double v = std::stod(fields[col]);
        if (std::isnan(v))
          throw std::runtime_error("load_gait: NaN at row " + std::to_string(row_number) +
                                   ", column " + what);
        if (!std::isfinite(v))
          throw std::runtime_error("load_gait: non-finite value at row " +
                                   std::to_string(row_number) + ", column " + what);
        return v;
      } catch (const std::invalid_argument&) {
        throw std::runtime_error("load_gait: unparsable value '" + fields[col] + "' at row " +
                                 std::to_string(row_number) + ", column " + what);
      }
    };
    times.push_back(parse(time_col, "time"));
    std::array<double, kGaitChannels> row;
    for (int k = 0; k < kGaitChannels; ++k) row[k] = parse(channel_col[k], kGaitChannelNames[k]);
    rows.push_back(row);
  }
  if (times.size() < 2) throw std::runtime_error("load_gait: '" + path + "' has fewer than 2 samples");

  VecX t = Eigen::Map<VecX>(times.data(), times.size());
  for (int i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1]))
      throw std::runtime_error("load_gait: time not strictly increasing at row " +
                               std::to_string(i + 2));
  MatX a(kGaitChannels, t.size());
  for (int i = 0; i < t.size(); ++i)
    for (int k = 0; k < kGaitChannels; ++k) a(k, i) = rows[i][k];

  // Uniform grid required downstream; resample if the file is not uniform.
  const double dt0 = t[1] - t[0];
  bool uniform = true;
  for (int i = 1; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - dt0) > 1e-9 * std::max(1.0, dt0)) uniform = false;

  GaitTrajectory out;
  if (uniform) {
    out.times = t.array() - t[0];
    out.angles = a;
    out.sample_rate = 1.0 / dt0;
  } else {
    const double mean_dt = (t[t.size() - 1] - t[0]) / static_cast<double>(t.size() - 1);
    out = resample_uniform(t, a, 1.0 / mean_dt);
  }
  out.validate();
  return out;
}

void save_gait(const GaitTrajectory& traj, const std::string& path) {
  traj.validate();
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_gait: cannot open '" + path + "'");
  out << "time";
  for (const auto& name : kGaitChannelNames) out << "," << name;
  out << "\n";
  out.precision(17);
  for (int i = 0; i < traj.sample_count(); ++i) {
    out << traj.times[i];
    for (int k = 0; k < kGaitChannels; ++k) out << "," << traj.angles(k, i);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------
// Synthetic gait
// ---------------------------------------------------------------------------

namespace {

constexpr double kDeg = M_PI / 180.0;

struct ChannelWave {
  double offset;  // deg
  double a1, p1;  // first harmonic amplitude (deg) and phase
  double a2, p2;  // second harmonic
};

// Right-leg waveforms, phase 0 at right heel strike. Left leg uses the same
// waveforms shifted by half a cycle. Amplitudes are desk-scale physiological:
// sagittal channels dominate, out-of-sagittal channels carry the kinematic
// mismatch the exoskeleton's sagittal-only joints cannot follow.
ChannelWave channel_wave(int channel) {
  switch (channel % 9) {
    case 0: return {10.0, 20.0, 0.30, 0.0, 0.0};   // hip flexion, 40 deg range
    case 1: return {0.0, 5.0, 1.00, 0.0, 0.0};     // hip ab/adduction
    case 2: return {0.0, 6.0, -1.57, 0.0, 0.0};    // hip int/ext rotation
    case 3: return {0.0, 0.0, 0.0, 0.0, 0.0};      // knee flexion: special-cased below
    case 4: return {0.0, 2.0, 0.50, 0.0, 0.0};     // knee ab/adduction
    case 5: return {0.0, 4.0, 1.30, 0.0, 0.0};     // knee rotation
    case 6: return {2.0, 12.0, 2.60, 0.0, 0.0};    // ankle flexion
    case 7: return {0.0, 6.0, 0.90, 0.0, 0.0};     // ankle inversion-eversion
    case 8: return {0.0, 4.0, -0.70, 0.0, 0.0};    // ankle rotation
  }
  return {};
}

}  // namespace

double synthetic_gait_channel(const SyntheticGaitParams& params, int channel, double phase) {
  if (channel < 0 || channel >= kGaitChannels)
    throw std::invalid_argument("synthetic_gait_channel: channel index out of range");
  double ph = phase;
  if (channel >= 9) ph += 0.5;  // left leg trails by half a cycle
  ph -= std::floor(ph);

  const int local = channel % 9;
  const bool sagittal = (local == 0 || local == 3 || local == 6);
  const double scale =
      params.amplitude * (sagittal ? params.sagittal_scale : params.coronal_scale);

  double deg;
  if (local == 3) {
    // Knee flexion: squared raised cosine, single swing peak, 60 deg range.
    const double b = 0.5 - 0.5 * std::cos(2.0 * M_PI * ph - 1.2);
    deg = 60.0 * b * b * scale;
  } else {
    const ChannelWave w = channel_wave(channel);
    deg = w.offset + scale * (w.a1 * std::cos(2.0 * M_PI * ph + w.p1) +
                              w.a2 * std::cos(4.0 * M_PI * ph + w.p2));
  }
  return deg * kDeg;
}

GaitTrajectory synthetic_gait(const SyntheticGaitParams& params) {
  if (!(params.cadence > 0.0)) throw std::invalid_argument("synthetic_gait: cadence must be > 0");
  if (params.cycles < 1) throw std::invalid_argument("synthetic_gait: cycles must be >= 1");
  if (!(params.sample_rate > 0.0))
    throw std::invalid_argument("synthetic_gait: sample_rate must be > 0");

  const double period = 1.0 / params.cadence;
  const double dt = 1.0 / params.sample_rate;
  const int n = static_cast<int>(std::lround(period * params.cycles * params.sample_rate)) + 1;

  GaitTrajectory out;
  out.times = VecX::LinSpaced(n, 0.0, dt * (n - 1));
  out.angles.resize(kGaitChannels, n);
  out.sample_rate = params.sample_rate;
  for (int i = 0; i < n; ++i) {
    const double phase = out.times[i] / period;
    for (int k = 0; k < kGaitChannels; ++k)
      out.angles(k, i) = synthetic_gait_channel(params, k, phase);
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Episode slicing
// ---------------------------------------------------------------------------

void EpisodeWindow::validate() const {
  auto in_range = [](double v) { return v >= 0.0 && v <= 100.0; };
  if (!in_range(stance_start) || !in_range(stance_end) || !in_range(swing_start) ||
      !in_range(swing_end))
    throw std::invalid_argument("episode window: fractions must lie in [0, 100]");
  if (!(stance_start < stance_end) || !(swing_start < swing_end))
    throw std::invalid_argument("episode window: start must precede end");
  if (std::abs((stance_end - stance_start) - (swing_end - swing_start)) > 1e-9)
    throw std::invalid_argument(
        "episode window: stance and swing windows must span equal fractions to share one clock");
}

GaitTrajectory slice_episode(const GaitTrajectory& traj, const EpisodeWindow& window) {
  traj.validate();
  window.validate();
  if (window.is_identity()) return traj;

  const int n = traj.sample_count();
  auto index_of = [&](double pct) {
    return static_cast<int>(std::lround(pct / 100.0 * (n - 1)));
  };
  const int s0 = index_of(window.stance_start), s1 = index_of(window.stance_end);
  const int w0 = index_of(window.swing_start), w1 = index_of(window.swing_end);
  if (s1 <= s0 || w1 <= w0) throw std::invalid_argument("slice_episode: window outside data");

  const int m = s1 - s0 + 1;
  GaitTrajectory out;
  out.times = traj.times.segment(s0, m).array() - traj.times[s0];
  out.angles.resize(kGaitChannels, m);
  out.sample_rate = traj.sample_rate;

  for (int i = 0; i < m; ++i) {
    // Stance (right) channels from the stance window.
    for (int k = 0; k < 9; ++k) out.angles(k, i) = traj.angles(k, s0 + i);
    // Swing (left) channels resampled from the swing window onto the clock.
    const double a = m > 1 ? static_cast<double>(i) / (m - 1) : 0.0;
    const double idx = w0 + a * (w1 - w0);
    const int k0 = std::min(static_cast<int>(std::floor(idx)), w1 - 1);
    const double frac = idx - k0;
    for (int k = 9; k < kGaitChannels; ++k)
      out.angles(k, i) = (1.0 - frac) * traj.angles(k, k0) + frac * traj.angles(k, k0 + 1);
  }
  out.validate();
  return out;
}

// ---------------------------------------------------------------------------
// Perturbations
// ---------------------------------------------------------------------------

GaitTrajectory add_awgn(const GaitTrajectory& traj, double snr_db, std::uint64_t seed) {
  if (std::isnan(snr_db)) throw std::invalid_argument("add_awgn: snr_db must not be NaN");
  if (std::isinf(snr_db)) return traj;

  GaitTrajectory out = traj;
  auto rng = std::mt19937_64(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int n = traj.sample_count();
  for (int k = 0; k < kGaitChannels; ++k) {
    // Signal power measured like MATLAB's awgn(x, snr, 'measured'): mean
    // square including the DC component.
    const double p_sig = traj.angles.row(k).squaredNorm() / n;
    const double sigma = std::sqrt(p_sig / std::pow(10.0, snr_db / 10.0));
    for (int i = 0; i < n; ++i) out.angles(k, i) += sigma * gauss(rng);
  }
  return out;
}

VecX perturb_initial(const VecX& q0, double gamma, std::uint64_t seed) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("perturb_initial: gamma must be >= 0");
  if (gamma == 0.0) return q0;
  VecX out = q0;
  auto rng = std::mt19937_64(seed);
  std::uniform_real_distribution<double> uni(-gamma, gamma);
  for (int i = 0; i < out.size(); ++i) out[i] += uni(rng);
  return out;
}

// ---------------------------------------------------------------------------
// Spline
// ---------------------------------------------------------------------------

GaitSpline::GaitSpline(const GaitTrajectory& traj) {
  traj.validate();
  n_ = traj.sample_count();
  t0_ = traj.times[0];
  dt_ = traj.times[1] - traj.times[0];
  y_ = traj.angles;
  m_.setZero(kGaitChannels, n_);
  if (n_ == 2) return;

  // Natural cubic spline: tridiagonal system for second derivatives, solved
  // per channel with the Thomas algorithm (uniform spacing).
  const int iw = n_ - 2;
  VecX c_prime(iw), d_prime(iw);
  for (int ch = 0; ch < kGaitChannels; ++ch) {
    for (int i = 0; i < iw; ++i) {
      const double rhs =
          6.0 * (y_(ch, i + 2) - 2.0 * y_(ch, i + 1) + y_(ch, i)) / (dt_ * dt_);
      if (i == 0) {
        c_prime[i] = 1.0 / 4.0;
        d_prime[i] = rhs / 4.0;
      } else {
        const double denom = 4.0 - c_prime[i - 1];
        c_prime[i] = 1.0 / denom;
        d_prime[i] = (rhs - d_prime[i - 1]) / denom;
      }
    }
    for (int i = iw - 1; i >= 0; --i) {
      m_(ch, i + 1) = d_prime[i] - (i + 1 < iw ? c_prime[i] * m_(ch, i + 2) : 0.0);
    }
  }
}

void GaitSpline::evaluate(double t, VecX& q, VecX& qdot) const {
  const double eps = 1e-9 * std::max(1.0, std::abs(t_max()));
  if (t < t_min() - eps || t > t_max() + eps) {
    std::ostringstream os;
    os << "gait spline: t=" << t << " outside [" << t_min() << ", " << t_max() << "]";
    throw std::out_of_range(os.str());
  }
  const double tc = std::clamp(t, t_min(), t_max());
  int i = std::min(static_cast<int>((tc - t0_) / dt_), n_ - 2);
  const double a = t0_ + i * dt_;
  const double x1 = tc - a, x2 = (a + dt_) - tc;

  q.resize(kGaitChannels);
  qdot.resize(kGaitChannels);
  for (int ch = 0; ch < kGaitChannels; ++ch) {
    const double ya = y_(ch, i), yb = y_(ch, i + 1);
    const double ma = m_(ch, i), mb = m_(ch, i + 1);
    q[ch] = (ma * x2 * x2 * x2 + mb * x1 * x1 * x1) / (6.0 * dt_) +
            (ya / dt_ - ma * dt_ / 6.0) * x2 + (yb / dt_ - mb * dt_ / 6.0) * x1;
    qdot[ch] = (-ma * x2 * x2 + mb * x1 * x1) / (2.0 * dt_) - (ya / dt_ - ma * dt_ / 6.0) +
               (yb / dt_ - mb * dt_ / 6.0);
  }
}

VecX GaitSpline::value(double t) const {
  VecX q, qd;
  evaluate(t, q, qd);
  return q;
}

// ---------------------------------------------------------------------------
// Attachment states
// ---------------------------------------------------------------------------

std::array<FrameState, kNumInterfaces> human_attachment_states(const HumanModel& model,
                                                               const GaitSpline& spline, double t) {
  VecX cq, cqd;
  spline.evaluate(t, cq, cqd);
  // Channel order and tree DoF order differ (the stance leg ascends).
  const auto dofs = human_channel_dofs(model);
  SystemState state = SystemState::zero(model.tree.dof_count());
  state.time = t;
  for (int c = 0; c < kGaitChannels; ++c) {
    state.q[dofs[c]] = cq[c];
    state.qdot[dofs[c]] = cqd[c];
  }
  const ForwardKinematics fk = forward_kinematics(model.tree, state);
  std::array<FrameState, kNumInterfaces> out;
  for (int i = 0; i < kNumInterfaces; ++i)
    out[i] = fk.attachment_state(model.tree, model.attachment[i]);
  return out;
}

std::array<FrameState, kNumInterfaces> human_attachment_states(const HumanModel& model,
                                                               const GaitTrajectory& traj, double t) {
  return human_attachment_states(model, GaitSpline(traj), t);
}

}  // namespace exosim
