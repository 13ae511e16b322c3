#pragma once

// Virtual wearer: gait trajectory ingestion and synthesis, episode slicing,
// spline interpolation of the joint reference, attachment-point kinematics,
// and the two perturbation sources (initial-condition offsets, additive
// Gaussian noise on the joint references).

#include <array>
#include <limits>
#include <string>
#include <vector>

#include "exosim/model.hpp"

namespace exosim {

struct GaitTrajectory {
  VecX times;   // strictly increasing, uniform [s]
  MatX angles;  // kGaitChannels x N [rad], rows in kGaitChannelNames order
  double sample_rate = 0.0;  // Hz

  int sample_count() const { return static_cast<int>(times.size()); }
  double duration() const { return times[times.size() - 1] - times[0]; }
  void validate() const;
};

/// Gait CSV: header row with a `time` column plus the 18 channel names (any
/// column order), one row per sample, times in seconds, angles in radians.
GaitTrajectory load_gait(const std::string& path);
void save_gait(const GaitTrajectory& traj, const std::string& path);

struct SyntheticGaitParams {
  double cadence = 0.9;        // gait cycles per second
  double amplitude = 1.0;      // scales every oscillatory term
  double sagittal_scale = 1.0; // extra scale on flexion channels
  double coronal_scale = 1.0;  // extra scale on out-of-sagittal channels
  int cycles = 1;
  double sample_rate = 240.0;  // Hz
  std::uint64_t seed = 0;      // reserved; the generator is closed-form
};

/// Smooth periodic joint trajectories with physiologically ordered phases;
/// left-leg channels are the right's shifted by half a cycle. Hip flexion
/// spans 40 deg and knee flexion 60 deg at amplitude 1 (generator contract).
GaitTrajectory synthetic_gait(const SyntheticGaitParams& params = {});

/// The generator's closed form for one channel at cycle phase in [0, 1).
double synthetic_gait_channel(const SyntheticGaitParams& params, int channel, double phase);

/// Gait-cycle windows, percent of the cycle.
struct EpisodeWindow {
  double stance_start = 12.0;
  double stance_end = 50.0;
  double swing_start = 62.0;
  double swing_end = 100.0;

  void validate() const;
  bool is_identity() const {
    return stance_start == 0.0 && stance_end == 100.0 && swing_start == 0.0 && swing_end == 100.0;
  }
};

/// Cuts stance-leg channels to [stance_start, stance_end] % and swing-leg
/// channels to [swing_start, swing_end] %, re-timed onto one episode clock
/// starting at zero. The right leg is the stance leg.
GaitTrajectory slice_episode(const GaitTrajectory& traj, const EpisodeWindow& window);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

/// Additive white Gaussian noise per channel, power set from the measured
/// per-channel signal power (DC included) so the realized SNR equals snr_db.
/// snr_db = +infinity is the no-noise sentinel.
GaitTrajectory add_awgn(const GaitTrajectory& traj, double snr_db, std::uint64_t seed);

/// Offsets every coordinate by an independent uniform draw in [-gamma, gamma].
VecX perturb_initial(const VecX& q0, double gamma, std::uint64_t seed);

/// Natural cubic spline over the uniform gait grid; analytic derivative.
class GaitSpline {
 public:
  explicit GaitSpline(const GaitTrajectory& traj);

  double t_min() const { return t0_; }
  double t_max() const { return t0_ + dt_ * (n_ - 1); }

  void evaluate(double t, VecX& q, VecX& qdot) const;
  VecX value(double t) const;

 private:
  int n_ = 0;
  double t0_ = 0.0, dt_ = 0.0;
  MatX y_, m_;  // values and second derivatives, kGaitChannels x N
};

/// Poses and twists of the wearer's attachment frames at time t (spline
/// interpolated). Interface order follows kInterfaceNames.
std::array<FrameState, kNumInterfaces> human_attachment_states(const HumanModel& model,
                                                               const GaitSpline& spline, double t);
std::array<FrameState, kNumInterfaces> human_attachment_states(const HumanModel& model,
                                                               const GaitTrajectory& traj, double t);

}  // namespace exosim
