#include <algorithm>
#include <cmath>
#include <random>

#include "gait/error.hpp"
#include "gait/synth.hpp"

namespace gait {

void GaitProfile::validate() const {
  gait::validate(params);
  if (!(cadence > 0.2 && cadence < 5.0)) {
    fail_input("cadence must lie in (0.2, 5) steps/s");
  }
  if (!(stance_fraction > 0.5 && stance_fraction < 0.9)) {
    fail_input("stance_fraction must lie in (0.5, 0.9)");
  }
  if (!(phase_offset > 1.0 - stance_fraction && phase_offset < stance_fraction)) {
    fail_input("phase_offset must lie strictly between 1 - stance_fraction "
               "and stance_fraction so both legs overlap in double support");
  }
  if (!(knee_peak_fraction > 0.0 && knee_peak_fraction < 1.0)) {
    fail_input("knee_peak_fraction must lie in (0, 1)");
  }
  if (!(lead_in_s >= 0.0) || !(lead_out_s >= 0.0)) {
    fail_input("lead-in and lead-out must be non-negative");
  }
  if (beta_f_spread < 0.0 || beta_b_spread < 0.0 || alpha_b_ratio_spread < 0.0) {
    fail_input("angle spreads must be non-negative");
  }
  if (shape.beta_b - beta_b_spread <= shape.beta_f + beta_f_spread) {
    fail_input("beta_b must stay above beta_f for every step, otherwise the "
               "knee minimum moves to foot-off");
  }
  if (knee_peak_deg <= shape.beta_b + beta_b_spread + 1.0) {
    fail_input("knee_peak_deg must exceed beta_b");
  }
  for (double L : step_lengths) {
    if (!(L > 0.0) || !std::isfinite(L)) {
      fail_input("target step lengths must be positive");
    }
  }
}

std::vector<ReferenceStep> GroundTruth::references() const {
  std::vector<ReferenceStep> out;
  out.reserve(steps.size());
  for (const TruthStep& s : steps) out.push_back({s.index, s.length, s.side});
  return out;
}

std::vector<double> constant_lengths(std::size_t steps, double length_cm) {
  return std::vector<double>(steps, length_cm);
}

std::vector<double> limp_lengths(std::size_t steps, double length_cm,
                                 Side first_side, Side short_side,
                                 std::size_t limp_from_stride,
                                 double asymmetry_pct) {
  const double a = asymmetry_pct / 100.0;
  const double shortened = length_cm * (1.0 - a / 2.0) / (1.0 + a / 2.0);
  std::vector<double> out(steps, length_cm);
  for (std::size_t j = 2 * limp_from_stride; j < steps; ++j) {
    const Side side = j % 2 == 0 ? first_side : other(first_side);
    if (side == short_side) out[j] = shortened;
  }
  return out;
}

namespace {

using Keyframe = AngleTrace::Keyframe;

struct LegEvent {
  double t;
  bool contact;  // false: foot-off
  std::size_t step;
};

void push_frame(std::vector<Keyframe>& frames, double t, double v) {
  if (!frames.empty() && t <= frames.back().t) {
    fail_invariant("generator produced non-increasing keyframe times");
  }
  frames.push_back({t, v});
}

}  // namespace

SynthAngles synthesize_angles(const GaitProfile& profile) {
  profile.validate();
  const std::size_t n = profile.step_lengths.size();
  const double cycle = 2.0 / profile.cadence;
  const double p = profile.phase_offset;
  const double sigma = profile.stance_fraction;

  auto side_of = [&](std::size_t j) {
    return j % 2 == 0 ? profile.first_side : other(profile.first_side);
  };
  // Time from the previous contact (of the other leg) to contact j.
  auto gap = [&](std::size_t j) {
    return (side_of(j) == Side::Right ? p : 1.0 - p) * cycle;
  };

  std::mt19937_64 rng(profile.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);

  SynthAngles out;
  out.truth.injected_bias = profile.noise.bias;
  const AngleBias& bias = profile.noise.bias;
  const double jitter = profile.noise.event_jitter_deg;

  double t_front = profile.lead_in_s + 0.5 * cycle;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) t_front += gap(j);
    KinematicShape shape = profile.shape;
    shape.beta_f += profile.beta_f_spread * unit(rng);
    shape.beta_b += profile.beta_b_spread * unit(rng);
    shape.alpha_b_ratio += profile.alpha_b_ratio_spread * unit(rng);
    std::array<double, 4> e{};
    for (double& v : e) v = jitter * normal(rng);

    TruthStep s;
    s.index = j;
    s.side = side_of(j);
    s.angles = solve_event_angles(profile.params, profile.step_lengths[j], shape);
    s.length = step_length(profile.params, s.angles).total;
    s.measured = apply_bias(s.angles, bias);
    s.measured.alpha_f += e[0];
    s.measured.beta_f += e[1];
    s.measured.alpha_b += e[2];
    s.measured.beta_b += e[3];
    s.t_front = t_front;
    s.t_back = t_front - gap(j) + sigma * cycle;
    out.truth.steps.push_back(s);
  }

  double last_event = profile.lead_in_s;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const Side side = leg == 0 ? Side::Left : Side::Right;
    std::vector<LegEvent> events;
    for (const TruthStep& s : out.truth.steps) {
      if (s.side == side) events.push_back({s.t_front, true, s.index});
      else events.push_back({s.t_back, false, s.index});
    }
    std::sort(events.begin(), events.end(),
              [](const LegEvent& a, const LegEvent& b) { return a.t < b.t; });

    std::vector<Keyframe> knee{{0.0, 0.0}};
    std::vector<Keyframe> hip{{0.0, 0.0}};
    if (!events.empty()) {
      const TruthStep& first = out.truth.steps.front();
      const double start = first.t_front - 0.5 * cycle;
      const double early = first.t_front - 0.2 * cycle;
      if (start > 0.0) {
        push_frame(knee, start, 0.0);
        push_frame(hip, start, 0.0);
      }
      if (events.front().contact) {
        // Leading leg swings forward out of standing.
        push_frame(knee, early, profile.knee_peak_deg);
      } else {
        // Trailing leg: the thigh first rocks forward so foot-off is a
        // proper hip minimum.
        const double top = std::max(first.measured.alpha_f,
                                    first.measured.alpha_b + 5.0);
        push_frame(hip, early, top);
      }
    }

    for (std::size_t k = 0; k < events.size(); ++k) {
      const LegEvent& ev = events[k];
      const EventAngles& g = out.truth.steps[ev.step].measured;
      if (ev.contact) {
        push_frame(knee, ev.t, g.beta_f);
        push_frame(hip, ev.t, g.alpha_f);
      } else {
        push_frame(knee, ev.t, g.beta_b);
        push_frame(hip, ev.t, g.alpha_b);
        if (k + 1 < events.size()) {
          const double swing = events[k + 1].t - ev.t;
          push_frame(knee, ev.t + profile.knee_peak_fraction * swing,
                     profile.knee_peak_deg);
        }
      }
      last_event = std::max(last_event, ev.t);
    }

    // Lead-out: rise out of the final minimum so it is detectable, then hold.
    if (!events.empty()) {
      const LegEvent& last = events.back();
      if (last.contact) {
        push_frame(knee, last.t + 0.5 * cycle, knee.back().value + 10.0);
      } else {
        push_frame(hip, last.t + 0.5 * cycle, hip.back().value + 10.0);
      }
    }
    out.traces[channel_of({side, Joint::Knee})] =
        AngleTrace::keyframes(std::move(knee));
    out.traces[channel_of({side, Joint::Hip})] =
        AngleTrace::keyframes(std::move(hip));
  }

  out.duration = n == 0 ? profile.lead_in_s + profile.lead_out_s
                        : last_event + 0.5 * cycle + profile.lead_out_s;
  return out;
}

RawTrial synthesize_raw(const GaitProfile& profile, const SynthAngles& angles) {
  std::mt19937_64 rng(profile.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const NoiseModel& noise = profile.noise;

  RawTrial raw;
  const auto n_imu =
      static_cast<std::size_t>(std::floor(angles.duration * kImuNativeRate)) + 1;
  const auto n_bend =
      static_cast<std::size_t>(std::floor(angles.duration * kBendNativeRate)) + 1;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    const Side side = leg == 0 ? Side::Left : Side::Right;
    const AngleTrace& hip = angles.traces[channel_of({side, Joint::Hip})];
    const AngleTrace& knee = angles.traces[channel_of({side, Joint::Knee})];

    raw.imu[leg].reserve(n_imu);
    for (std::size_t k = 0; k < n_imu; ++k) {
      const double t = static_cast<double>(k) / kImuNativeRate;
      const double a = deg_to_rad(hip.value(t));
      // The mounting flips are their own inverses.
      Vec3 accel = to_canonical(profile.mounting,
                                Vec3{std::sin(a), 0.0, std::cos(a)});
      Vec3 gyro = to_canonical(profile.mounting, Vec3{0.0, -hip.rate(t), 0.0});
      for (std::size_t i = 0; i < 3; ++i) {
        accel[i] += noise.accel_noise_g * normal(rng);
        gyro[i] += profile.gyro_offset_dps[leg][i] +
                   noise.gyro_noise_dps * normal(rng);
      }
      raw.imu[leg].push_back({t, accel, gyro});
    }

    raw.bend[leg].reserve(n_bend);
    for (std::size_t k = 0; k < n_bend; ++k) {
      const double t = static_cast<double>(k) / kBendNativeRate;
      raw.bend[leg].push_back({t, knee.value(t) + profile.bend_offset_deg[leg] +
                                      noise.bend_noise_deg * normal(rng)});
    }
  }
  return raw;
}

}  // namespace gait
