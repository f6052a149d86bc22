#include <cctype>
#include <cmath>
#include <string>

#include "gait/core.hpp"
#include "gait/error.hpp"
#include "gait/orientation.hpp"

namespace gait {

double Quaternion::norm() const noexcept {
  return std::sqrt(w * w + x * x + y * y + z * z);
}

Quaternion Quaternion::normalized() const noexcept {
  const double n = norm();
  return {w / n, x / n, y / n, z / n};
}

Quaternion operator*(const Quaternion& a, const Quaternion& b) noexcept {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

Quaternion from_axis_angle(const Vec3& axis, double angle_rad) noexcept {
  const double n =
      std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  const double s = std::sin(angle_rad / 2.0) / n;
  return {std::cos(angle_rad / 2.0), axis[0] * s, axis[1] * s, axis[2] * s};
}

Vec3 rotate(const Quaternion& q, const Vec3& v) noexcept {
  const Quaternion p{0.0, v[0], v[1], v[2]};
  const Quaternion r = q * p * q.conjugate();
  return {r.x, r.y, r.z};
}

Vec3 gravity_in_sensor(const Quaternion& q) noexcept {
  return {2.0 * (q.x * q.z - q.w * q.y), 2.0 * (q.w * q.x + q.y * q.z),
          q.w * q.w - q.x * q.x - q.y * q.y + q.z * q.z};
}

std::string_view to_string(Mounting m) noexcept {
  switch (m) {
    case Mounting::ZUpXForward: return "z_up_x_forward";
    case Mounting::ZUpXBackward: return "z_up_x_backward";
    case Mounting::ZDownXForward: return "z_down_x_forward";
    case Mounting::ZDownXBackward: return "z_down_x_backward";
  }
  return "z_up_x_forward";
}

Mounting parse_mounting(std::string_view text) {
  for (Mounting m : {Mounting::ZUpXForward, Mounting::ZUpXBackward,
                     Mounting::ZDownXForward, Mounting::ZDownXBackward}) {
    if (text == to_string(m)) return m;
  }
  fail_input("unknown mounting_axis '" + std::string(text) +
             "' (expected z_up_x_forward, z_up_x_backward, z_down_x_forward "
             "or z_down_x_backward)");
}

Vec3 to_canonical(Mounting m, const Vec3& v) noexcept {
  switch (m) {
    case Mounting::ZUpXForward: return v;
    case Mounting::ZUpXBackward: return {-v[0], -v[1], v[2]};
    case Mounting::ZDownXForward: return {v[0], -v[1], -v[2]};
    case Mounting::ZDownXBackward: return {-v[0], v[1], -v[2]};
  }
  return v;
}

ImuSample to_canonical(Mounting m, const ImuSample& raw) noexcept {
  return {raw.t, to_canonical(m, raw.accel), to_canonical(m, raw.gyro)};
}

double accel_tilt_deg(const Vec3& accel) noexcept {
  return rad_to_deg(std::atan2(accel[0], accel[2]));
}

double hip_angle(const Quaternion& q, Mounting mounting) noexcept {
  const Vec3 g = to_canonical(mounting, gravity_in_sensor(q));
  return rad_to_deg(std::atan2(g[0], g[2]));
}

Quaternion sagittal_rotation(double hip_deg) noexcept {
  const double half = deg_to_rad(hip_deg) / 2.0;
  return {std::cos(half), 0.0, -std::sin(half), 0.0};
}

}  // namespace gait
