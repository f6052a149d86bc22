#pragma once

// Sagittal-plane step model and the derived gait quantities (strides,
// stance/swing split, velocity, percentage asymmetry).

#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gait {

enum class Side { Left = 0, Right = 1 };

constexpr Side other(Side s) noexcept {
  return s == Side::Left ? Side::Right : Side::Left;
}
constexpr std::size_t index_of(Side s) noexcept {
  return static_cast<std::size_t>(s);
}
std::string_view to_string(Side s) noexcept;
/// Accepts "L"/"R"/"Left"/"Right" (case-insensitive).
Side parse_side(std::string_view text);

constexpr double deg_to_rad(double deg) noexcept {
  return deg * (std::numbers::pi / 180.0);
}
constexpr double rad_to_deg(double rad) noexcept {
  return rad * (180.0 / std::numbers::pi);
}

/// Per-user body lengths, all in cm.
struct StaticParams {
  double l1 = 0.0;  ///< gluteus to popliteus (thigh)
  double l2 = 0.0;  ///< popliteus to calcaneus (lower leg)
  double d5 = 0.0;  ///< thigh diameter below the gluteus

  bool operator==(const StaticParams&) const = default;
};

/// Throws InvalidInput unless all three lengths are finite and positive.
void validate(const StaticParams& p);
/// Soft plausibility check (l1 < l2 + 30 cm); returns a warning message.
std::optional<std::string> plausibility_warning(const StaticParams& p);

/// Joint angles at the two key events of a step, in degrees. Hip angles are
/// signed (negative behind the torso); knee angles are flexion, >= 0.
struct EventAngles {
  double alpha_f = 0.0;  ///< front hip, at front initial contact
  double beta_f = 0.0;   ///< front knee, at front initial contact
  double alpha_b = 0.0;  ///< back hip, at back foot-off
  double beta_b = 0.0;   ///< back knee, at back foot-off

  bool operator==(const EventAngles&) const = default;
};

struct StepLengthBreakdown {
  double d1 = 0.0;  ///< front shank projection
  double d2 = 0.0;  ///< front thigh projection
  double d3 = 0.0;  ///< back thigh projection (signed)
  double d4 = 0.0;  ///< back shank projection
  double d5 = 0.0;  ///< thigh diameter
  double total = 0.0;
};

/// Step length as the sum of the five stick-model projections. The two
/// back-leg configurations (hip behind or in front of the torso) are covered
/// by the sign of alpha_b alone.
StepLengthBreakdown step_length(const StaticParams& params,
                                const EventAngles& angles);

struct StepMeasurement {
  std::size_t index = 0;
  Side front_side = Side::Left;
  EventAngles angles;
  double t_front_event = 0.0;  ///< front knee minimum (initial contact), s
  double t_back_event = 0.0;   ///< back hip minimum (foot-off), s
  double length = 0.0;         ///< cm
};

/// Fills `length` of every step from its angles.
void assign_lengths(std::span<StepMeasurement> steps,
                    const StaticParams& params);

struct Stride {
  std::size_t index = 0;
  StepMeasurement step_a;  ///< tracked leg in front
  StepMeasurement step_b;  ///< other leg in front
  double length = 0.0;       ///< cm
  double stride_time = 0.0;  ///< s, tracked leg contact to next contact
  double stance_time = 0.0;  ///< s
  double swing_time = 0.0;   ///< s
  double velocity = 0.0;     ///< m/s over the trailing five-stride window
  std::size_t velocity_window = 0;
  bool velocity_partial = false;
  /// True when no later step was available and stride_time was
  /// extrapolated as twice the step interval.
  bool time_extrapolated = false;

  Side tracked_side() const noexcept { return step_a.front_side; }
  double left_length() const noexcept;
  double right_length() const noexcept;
};

inline constexpr std::size_t kVelocityWindowStrides = 5;

/// Pairs steps (0,1), (2,3), ... into strides. Throws InvalidInput when
/// fewer than two steps are given and Invariant when the sides do not
/// alternate.
std::vector<Stride> stride_metrics(std::span<const StepMeasurement> steps);

/// Builds one stride. `next` is the step following `b`, when known; it fixes
/// the tracked leg's next initial contact.
Stride make_stride(std::size_t index, const StepMeasurement& a,
                   const StepMeasurement& b, const StepMeasurement* next);

/// Fills velocity fields of strides[i] from strides[i-4..i].
void assign_velocity(std::span<Stride> strides, std::size_t i);

struct GaitAsymmetry {
  std::size_t stride_index = 0;
  double percent = 0.0;
};

inline constexpr double kDefaultAsymmetryThresholdPct = 25.0;

/// |L_left - L_right| / mean(L_left, L_right) * 100.
double asymmetry_percent(double left_cm, double right_cm);
GaitAsymmetry gait_asymmetry(const Stride& stride);

}  // namespace gait
