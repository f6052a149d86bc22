#include <algorithm>
#include <cmath>

#include "gait/core.hpp"
#include "gait/orientation.hpp"

namespace gait {

namespace {

bool usable(const Vec3& a, double& norm) noexcept {
  norm = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  return std::isfinite(norm) && norm > 0.0;
}

}  // namespace

OrientationFilterState madgwick_update(const OrientationFilterState& state,
                                       const Vec3& accel, const Vec3& gyro,
                                       double dt) {
  // Trapezoidal rate over the interval once a previous sample exists.
  Vec3 rate = gyro;
  if (state.has_last_gyro) {
    for (std::size_t i = 0; i < 3; ++i) {
      rate[i] = 0.5 * (state.last_gyro[i] + gyro[i]);
    }
  }
  const Quaternion& q0 = state.q;
  const double gx = deg_to_rad(rate[0]);
  const double gy = deg_to_rad(rate[1]);
  const double gz = deg_to_rad(rate[2]);

  // Rate of change from the gyroscope: 0.5 q (x) (0, w).
  const double dw = 0.5 * (-q0.x * gx - q0.y * gy - q0.z * gz);
  const double dx = 0.5 * (q0.w * gx + q0.y * gz - q0.z * gy);
  const double dy = 0.5 * (q0.w * gy - q0.x * gz + q0.z * gx);
  const double dz = 0.5 * (q0.w * gz + q0.x * gy - q0.y * gx);
  Quaternion q{q0.w + dw * dt, q0.x + dx * dt, q0.y + dy * dt, q0.z + dz * dt};

  OrientationFilterState next = state;
  next.last_gyro = gyro;
  next.has_last_gyro = true;
  double an = 0.0;
  next.gyro_only = !usable(accel, an);
  if (!next.gyro_only) {
    // The gradient is taken at the gyro prediction, so the correction
    // compares orientation and gravity at the same instant.
    q = q.normalized();
    const double ax = accel[0] / an;
    const double ay = accel[1] / an;
    const double az = accel[2] / an;

    // Objective f = predicted gravity - measured gravity; step = J^T f.
    const double f1 = 2.0 * (q.x * q.z - q.w * q.y) - ax;
    const double f2 = 2.0 * (q.w * q.x + q.y * q.z) - ay;
    const double f3 = 2.0 * (0.5 - q.x * q.x - q.y * q.y) - az;
    const double sw = -2.0 * q.y * f1 + 2.0 * q.x * f2;
    const double sx = 2.0 * q.z * f1 + 2.0 * q.w * f2 - 4.0 * q.x * f3;
    const double sy = -2.0 * q.w * f1 + 2.0 * q.z * f2 - 4.0 * q.y * f3;
    const double sz = 2.0 * q.x * f1 + 2.0 * q.y * f2;
    const double sn = std::sqrt(sw * sw + sx * sx + sy * sy + sz * sz);
    if (sn > 0.0) {
      // A quaternion step of size s turns the estimate by about 2 s. The
      // fixed step beta dt is capped at half the remaining tilt error so
      // the estimate settles on gravity instead of stepping across it.
      const double px = f1 + ax;
      const double py = f2 + ay;
      const double pz = f3 + az;
      const double pn = std::sqrt(px * px + py * py + pz * pz);
      const double cos_err =
          std::clamp((px * ax + py * ay + pz * az) / pn, -1.0, 1.0);
      const double size = std::min(state.beta_gain * dt, 0.5 * std::acos(cos_err));
      const double step = size / sn;
      q = Quaternion{q.w - step * sw, q.x - step * sx, q.y - step * sy,
                     q.z - step * sz};
    }
  }

  next.q = q.normalized();
  next.last_t = state.last_t + dt;
  return next;
}

ComplementaryState complementary_update(const ComplementaryState& state,
                                        const Vec3& accel, const Vec3& gyro,
                                        double dt) {
  ComplementaryState next = state;
  // Hip angle rate is the negated lateral gyro axis in the canonical frame.
  const double predicted = state.angle_deg - gyro[1] * dt;
  double an = 0.0;
  next.gyro_only = !usable(accel, an);
  next.angle_deg =
      next.gyro_only
          ? predicted
          : state.blend * predicted + (1.0 - state.blend) * accel_tilt_deg(accel);
  next.last_t = state.last_t + dt;
  return next;
}

}  // namespace gait
