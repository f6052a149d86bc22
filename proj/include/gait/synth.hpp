#pragma once

// Synthetic two-leg gait. Ground-truth steps are turned into knee and hip
// angle keyframes, joined by smooth raised-cosine segments, and sampled as
// raw bend-sensor and IMU streams that the analysis pipeline can ingest.

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "gait/calibrate.hpp"
#include "gait/core.hpp"
#include "gait/events.hpp"
#include "gait/orientation.hpp"
#include "gait/signal.hpp"

namespace gait {

/// A joint angle as a continuous function of time, with its rate.
struct AngleTrace {
  std::function<double(double)> value;  ///< deg
  std::function<double(double)> rate;   ///< deg/s

  struct Keyframe {
    double t = 0.0;
    double value = 0.0;
  };

  static AngleTrace constant(double deg);
  static AngleTrace sine(double offset_deg, double amplitude_deg, double freq_hz,
                         double phase_rad = 0.0);
  /// Holds the first and last values outside the keyframe span; between
  /// keyframes uses eased_cosine, so the trace is flat at every keyframe.
  static AngleTrace keyframes(std::vector<Keyframe> frames);
};

/// 0 -> 1 over u in [0, 1] with zero first derivative at both ends and
/// vanishing higher derivatives there too: (1 - cos(pi w)) / 2 with
/// w = (1 - cos(pi u)) / 2.
double eased_cosine(double u) noexcept;
double eased_cosine_slope(double u) noexcept;

/// How the four event angles are tied together when inverting the step
/// model for a target length.
struct KinematicShape {
  double beta_f = 10.0;           ///< deg
  double beta_b = 15.0;           ///< deg
  double alpha_b_ratio = -1.0 / 3.0;  ///< alpha_b = ratio * alpha_f
  double max_alpha_f = 60.0;      ///< deg
};

/// Event angles whose step length equals `target_cm`. Long steps solve for
/// alpha_f by bisection with the other angles tied to it; steps shorter than
/// the alpha_f = 0 length scale both knee angles down towards standing.
/// Throws InvalidInput, naming the limiting angle, when no solution exists.
EventAngles solve_event_angles(const StaticParams& params, double target_cm,
                               const KinematicShape& shape = {});

struct NoiseModel {
  double bend_noise_deg = 0.0;   ///< white noise per bend sample
  double accel_noise_g = 0.0;    ///< white noise per accel axis sample
  double gyro_noise_dps = 0.0;   ///< white noise per gyro axis sample
  double event_jitter_deg = 0.0; ///< per step and angle, on measured angles
  AngleBias bias;                ///< constant offset on measured angles
};

struct GaitProfile {
  StaticParams params{30.0, 45.0, 14.0};
  double cadence = 1.8;  ///< steps/s
  std::vector<double> step_lengths;  ///< target per step, cm
  Side first_side = Side::Left;
  double phase_offset = 0.5;  ///< right contact within the left cycle
  double stance_fraction = 0.6;
  double knee_peak_deg = 55.0;
  double knee_peak_fraction = 0.35;  ///< of swing, after foot-off
  KinematicShape shape;
  /// Uniform per-step spread on the tied angles (+/- value).
  double beta_f_spread = 0.0;
  double beta_b_spread = 0.0;
  double alpha_b_ratio_spread = 0.0;
  double lead_in_s = 2.0;   ///< standing still before the first step
  double lead_out_s = 1.5;
  NoiseModel noise;
  std::array<Vec3, 2> gyro_offset_dps{};  ///< per leg, raw frame
  std::array<double, 2> bend_offset_deg{};
  Mounting mounting = Mounting::ZUpXForward;
  std::uint64_t seed = 1;

  /// Throws InvalidInput for an unusable profile.
  void validate() const;
};

struct TruthStep {
  std::size_t index = 0;
  Side side = Side::Left;
  double length = 0.0;  ///< step model at `angles`, cm
  EventAngles angles;   ///< true event angles
  EventAngles measured; ///< angles placed in the traces
  double t_front = 0.0;
  double t_back = 0.0;
};

struct GroundTruth {
  std::vector<TruthStep> steps;
  AngleBias injected_bias;

  std::vector<ReferenceStep> references() const;
};

struct SynthAngles {
  /// Channel order: knee L, knee R, hip L, hip R.
  std::array<AngleTrace, 4> traces;
  double duration = 0.0;  ///< s
  GroundTruth truth;

  /// Traces sampled at `rate` from t = 0.
  AngleQuad sample(double rate = 25.0) const;
};

SynthAngles synthesize_angles(const GaitProfile& profile);

struct RawTrial {
  std::array<std::vector<ImuSample>, 2> imu;    ///< per leg, 250 Hz
  std::array<std::vector<BendSample>, 2> bend;  ///< per leg, 100 Hz
};

/// Bend angle = knee trace; IMU gravity and rate follow the hip trace in the
/// profile's mounting frame, plus the configured offsets and noise.
RawTrial synthesize_raw(const GaitProfile& profile, const SynthAngles& angles);

/// Targets: constant length, or a limp where from `limp_from_stride` on the
/// `short_side` steps are shortened to give `asymmetry_pct` (step model
/// asymmetry between the two sides).
std::vector<double> constant_lengths(std::size_t steps, double length_cm);
std::vector<double> limp_lengths(std::size_t steps, double length_cm,
                                 Side first_side, Side short_side,
                                 std::size_t limp_from_stride,
                                 double asymmetry_pct);

}  // namespace gait
