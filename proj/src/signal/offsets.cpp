#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gait/error.hpp"
#include "gait/signal.hpp"

namespace gait {

std::optional<std::string> range_violation(const ImuSample& s) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (!std::isfinite(s.accel[i]) || std::abs(s.accel[i]) > kAccelRangeG) {
      std::ostringstream os;
      os << "accel axis " << i << " = " << s.accel[i]
         << " g outside the +-8g accelerometer range";
      return os.str();
    }
    if (!std::isfinite(s.gyro[i]) || std::abs(s.gyro[i]) > kGyroRangeDps) {
      std::ostringstream os;
      os << "gyro axis " << i << " = " << s.gyro[i]
         << " deg/s outside the +-250 deg/s gyroscope range";
      return os.str();
    }
  }
  return std::nullopt;
}

std::optional<std::string> range_violation(const BendSample& s) {
  if (!std::isfinite(s.angle) || std::abs(s.angle) > kBendRangeDeg) {
    std::ostringstream os;
    os << "bend angle " << s.angle << " deg outside +-180 deg";
    return os.str();
  }
  return std::nullopt;
}

double median(std::span<const double> values) {
  if (values.empty()) fail_input("median of an empty sequence");
  std::vector<double> v(values.begin(), values.end());
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

namespace {

// Standard deviation estimated from the median absolute deviation, so a
// single glitch does not fail an otherwise still window.
double robust_sd(std::span<const double> v, double center) {
  std::vector<double> dev(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) dev[i] = std::abs(v[i] - center);
  return 1.4826 * median(dev);
}

template <typename Sample>
void check_window(std::span<const Sample> w, const char* what) {
  if (w.size() < kMinCalibrationSamples) {
    fail_calibration(std::string(what) + " standing window has " +
                     std::to_string(w.size()) + " samples, need at least " +
                     std::to_string(kMinCalibrationSamples));
  }
  const double span = w.back().t - w.front().t;
  const double covered = span + span / static_cast<double>(w.size() - 1);
  if (covered < kMinCalibrationSeconds - 1e-9) {
    fail_calibration(std::string(what) + " standing window covers " +
                     std::to_string(covered) + " s, need at least 1 s");
  }
}

double still_median(const std::vector<double>& v, double sd_limit,
                    const std::string& channel) {
  const double center = median(v);
  const double sd = robust_sd(v, center);
  if (!(sd < sd_limit)) {
    std::ostringstream os;
    os << "calibration failed: " << channel << " moved during the standing "
       << "window (sd " << sd << " >= " << sd_limit << ")";
    fail_calibration(os.str());
  }
  return center;
}

}  // namespace

ImuOffsets compute_imu_offsets(std::span<const ImuSample> standing,
                               const StillnessLimits& limits) {
  check_window(standing, "IMU");
  ImuOffsets out;
  std::vector<double> column(standing.size());
  for (std::size_t axis = 0; axis < 3; ++axis) {
    for (std::size_t i = 0; i < standing.size(); ++i) {
      column[i] = standing[i].accel[axis];
    }
    out.accel[axis] = still_median(column, limits.accel_sd_g,
                                   "accel axis " + std::to_string(axis));
    for (std::size_t i = 0; i < standing.size(); ++i) {
      column[i] = standing[i].gyro[axis];
    }
    out.gyro[axis] = still_median(column, limits.gyro_sd_dps,
                                  "gyro axis " + std::to_string(axis));
  }
  out.accel[2] -= 1.0;
  return out;
}

double compute_bend_offset(std::span<const BendSample> standing,
                           const StillnessLimits& limits) {
  check_window(standing, "bend");
  std::vector<double> column(standing.size());
  for (std::size_t i = 0; i < standing.size(); ++i) {
    column[i] = standing[i].angle;
  }
  return still_median(column, limits.bend_sd_deg, "bend angle");
}

ImuSample subtract_offsets(const ImuSample& s, const ImuOffsets& o) noexcept {
  ImuSample out = s;
  for (std::size_t i = 0; i < 3; ++i) {
    out.accel[i] -= o.accel[i];
    out.gyro[i] -= o.gyro[i];
  }
  return out;
}

}  // namespace gait
