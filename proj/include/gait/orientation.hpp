#pragma once

// Hip-angle estimation from a thigh-mounted IMU.
//
// Canonical sensor frame: z along the thigh pointing up towards the hip,
// x forward in the sagittal plane, y completing a right-handed frame
// (pointing left). Flexing the hip (knee forward) tilts z backwards, so a
// static hip angle a reads accel = (sin a, 0, cos a) g and a hip angle rate
// da/dt reads gyro_y = -da/dt.

#include <string>
#include <string_view>

#include "gait/signal.hpp"

namespace gait {

struct Quaternion {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  static constexpr Quaternion identity() noexcept { return {}; }

  double norm() const noexcept;
  Quaternion normalized() const noexcept;
  Quaternion conjugate() const noexcept { return {w, -x, -y, -z}; }

  friend Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept;
  bool operator==(const Quaternion&) const = default;
};

Quaternion from_axis_angle(const Vec3& axis, double angle_rad) noexcept;
/// Rotates v by q (q v q*).
Vec3 rotate(const Quaternion& q, const Vec3& v) noexcept;
/// Unit gravity reaction predicted in the sensor frame for orientation q.
Vec3 gravity_in_sensor(const Quaternion& q) noexcept;

/// How the IMU is strapped to the thigh, expressed as a fixed 180 degree
/// rotation from the raw axes into the canonical frame.
enum class Mounting {
  ZUpXForward,
  ZUpXBackward,
  ZDownXForward,
  ZDownXBackward,
};

std::string_view to_string(Mounting m) noexcept;
Mounting parse_mounting(std::string_view text);
Vec3 to_canonical(Mounting m, const Vec3& raw) noexcept;
ImuSample to_canonical(Mounting m, const ImuSample& raw) noexcept;

inline constexpr double kDefaultMadgwickBeta = 0.1;

struct OrientationFilterState {
  Quaternion q;
  double beta_gain = kDefaultMadgwickBeta;
  double last_t = 0.0;
  /// Set when the last update had no usable accelerometer vector.
  bool gyro_only = false;
  Vec3 last_gyro{};
  bool has_last_gyro = false;
};

/// One step of the 6-axis Madgwick filter: gyro integration (trapezoidal
/// after the first sample) plus one normalized gradient-descent step of size
/// beta dt towards the measured gravity direction, evaluated at the
/// gyro-propagated orientation and capped so it never turns past gravity.
/// accel in g (any non-zero scale), gyro in deg/s, dt in s.
OrientationFilterState madgwick_update(const OrientationFilterState& state,
                                       const Vec3& accel, const Vec3& gyro,
                                       double dt);

inline constexpr double kDefaultComplementaryBlend = 0.98;

struct ComplementaryState {
  double angle_deg = 0.0;
  double blend = kDefaultComplementaryBlend;  ///< weight of the gyro path
  double last_t = 0.0;
  bool gyro_only = false;
};

/// angle = k (angle + rate dt) + (1 - k) accel_angle, in the sagittal plane.
ComplementaryState complementary_update(const ComplementaryState& state,
                                        const Vec3& accel, const Vec3& gyro,
                                        double dt);

/// Sagittal tilt implied by a gravity reading, degrees.
double accel_tilt_deg(const Vec3& accel) noexcept;

/// Signed sagittal hip angle in degrees; positive with the thigh in front.
/// `mounting` names the frame q was estimated in.
double hip_angle(const Quaternion& q,
                 Mounting mounting = Mounting::ZUpXForward) noexcept;

/// Orientation of a thigh at the given sagittal hip angle.
Quaternion sagittal_rotation(double hip_deg) noexcept;

}  // namespace gait
