#pragma once

// Sensor-side preprocessing: standing-still offsets and the centered
// downsample-and-smooth filter that brings every stream to 25 Hz.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gait {

using Vec3 = std::array<double, 3>;

struct ImuSample {
  double t = 0.0;  ///< s
  Vec3 accel{};    ///< g
  Vec3 gyro{};     ///< deg/s
};

struct BendSample {
  double t = 0.0;      ///< s
  double angle = 0.0;  ///< deg
};

/// Sensor full-scale ranges.
inline constexpr double kAccelRangeG = 8.0;
inline constexpr double kGyroRangeDps = 250.0;
inline constexpr double kBendRangeDeg = 180.0;

/// Native sampling rates before smoothing, Hz.
inline constexpr double kImuNativeRate = 250.0;
inline constexpr double kBendNativeRate = 100.0;
/// Decimation factors that bring both sensors to 25 Hz.
inline constexpr std::size_t kImuDownsample = 10;
inline constexpr std::size_t kBendDownsample = 4;

/// Returns a diagnostic when a reading lies outside the sensor range.
std::optional<std::string> range_violation(const ImuSample& s);
std::optional<std::string> range_violation(const BendSample& s);

/// Uniformly sampled scalar stream; sample k is at t0 + k / rate.
struct UniformSeries {
  double t0 = 0.0;
  double rate = 0.0;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double time(std::size_t k) const noexcept {
    return t0 + static_cast<double>(k) / rate;
  }
};

/// Six smoothed IMU channels on a common grid.
struct ImuSeries {
  double t0 = 0.0;
  double rate = 0.0;
  std::array<std::vector<double>, 3> accel;
  std::array<std::vector<double>, 3> gyro;

  std::size_t size() const noexcept { return accel[0].size(); }
  double time(std::size_t k) const noexcept {
    return t0 + static_cast<double>(k) / rate;
  }
  Vec3 accel_at(std::size_t k) const noexcept {
    return {accel[0][k], accel[1][k], accel[2][k]};
  }
  Vec3 gyro_at(std::size_t k) const noexcept {
    return {gyro[0][k], gyro[1][k], gyro[2][k]};
  }
};

double median(std::span<const double> values);

/// Per-channel standard deviation limits for the standing window.
struct StillnessLimits {
  double accel_sd_g = 0.05;
  double gyro_sd_dps = 2.0;
  double bend_sd_deg = 1.0;
};

inline constexpr std::size_t kMinCalibrationSamples = 25;
inline constexpr double kMinCalibrationSeconds = 1.0;

struct ImuOffsets {
  Vec3 accel{};
  Vec3 gyro{};
};

/// Medians of the standing window. The accelerometer keeps 1 g on the
/// vertical (z) axis: its offset is the deviation of the median from 1 g.
/// Stillness is judged on a MAD-based standard deviation. Throws
/// Calibration when the window is too short or the subject moved.
ImuOffsets compute_imu_offsets(std::span<const ImuSample> standing,
                               const StillnessLimits& limits = {});
double compute_bend_offset(std::span<const BendSample> standing,
                           const StillnessLimits& limits = {});

ImuSample subtract_offsets(const ImuSample& s, const ImuOffsets& o) noexcept;

/// Timestamp audit against a nominal rate. Samples are re-indexed by order;
/// timing only produces diagnostics.
struct TimestampReport {
  double max_jitter_s = 0.0;    ///< max |dt - period|
  bool jitter_warning = false;  ///< max jitter above 20% of the period
  std::size_t backwards = 0;    ///< dt < 0 within tolerance
};

inline constexpr double kJitterWarnFraction = 0.2;

/// Throws InvalidInput when a timestamp goes backwards by more than the
/// jitter tolerance or the median period is more than 5% off nominal.
TimestampReport check_timestamps(std::span<const double> t,
                                 double nominal_rate);

/// Incremental form of the timestamp audit: throws InvalidInput when time
/// goes backwards beyond the tolerance and tracks the worst jitter.
class TimestampMonitor {
 public:
  /// `context` prefixes the error message.
  void add(double t, double nominal_rate, const std::string& context = {});
  double max_jitter_s() const noexcept { return max_jitter_; }
  /// Diagnostic when jitter exceeded 20% of the nominal period.
  std::optional<std::string> warning(double nominal_rate,
                                     const std::string& context = {}) const;

 private:
  std::optional<double> last_;
  double max_jitter_ = 0.0;
};

/// Centered 2M-sample mean, decimated by M. Output k (k >= 1) averages
/// input samples M(k-1) .. M(k+1)-1 and is stamped at t_first + M k / rate;
/// windows that would run past either end are dropped. Throws InvalidInput
/// for an empty stream, M == 0, or a stream shorter than 2M.
UniformSeries downsample_smooth(std::span<const double> values, double t_first,
                                double native_rate, std::size_t m);
UniformSeries downsample_smooth(std::span<const BendSample> stream,
                                double native_rate, std::size_t m);
ImuSeries downsample_smooth(std::span<const ImuSample> stream,
                            double native_rate, std::size_t m);

/// Incremental form of downsample_smooth for one channel; emits the same
/// values bit for bit.
class StreamingWindowMean {
 public:
  explicit StreamingWindowMean(std::size_t m);

  /// Returns a smoothed value every M samples once 2M have arrived.
  std::optional<double> push(double x);
  std::size_t emitted() const noexcept { return emitted_; }

 private:
  std::size_t m_;
  std::vector<double> window_;
  std::size_t emitted_ = 0;
};

}  // namespace gait
