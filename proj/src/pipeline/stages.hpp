#pragma once

// Helpers shared by the batch and streaming paths. Both must run the same
// arithmetic in the same order to produce identical records.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "gait/error.hpp"

#include "gait/orientation.hpp"
#include "gait/pipeline.hpp"

namespace gait::detail {

inline constexpr std::array<const char*, 2> kLegName = {"left", "right"};

inline bool in_calibration_window(double t, double t_first,
                                  const PipelineConfig& c) noexcept {
  return t - t_first < c.calibration_s;
}

inline ImuSample canonical(const ImuSample& raw, const PipelineConfig& c) {
  return to_canonical(c.mounting, raw);
}

inline double imu_step(const PipelineConfig& c) noexcept {
  return static_cast<double>(c.downsample_imu) / c.imu_rate;
}

inline OrientationFilterState initial_filter(const PipelineConfig& c) {
  OrientationFilterState s;
  s.beta_gain = c.madgwick_beta;
  return s;
}

/// First output time of a smoothed stream.
inline double smoothed_start(double t_first, std::size_t m, double rate) noexcept {
  return t_first + static_cast<double>(m) / rate;
}

struct Alignment {
  std::array<std::size_t, 4> skip{};
  double t0 = 0.0;
  double skew = 0.0;
};

/// Drops leading samples so the four channels start together; channel 0
/// (left knee) defines the common grid.
inline Alignment align_starts(const std::array<double, 4>& starts, double rate) {
  double ref = starts[0];
  for (double s : starts) ref = std::max(ref, s);
  Alignment a;
  for (std::size_t c = 0; c < 4; ++c) {
    a.skip[c] = static_cast<std::size_t>(std::llround((ref - starts[c]) * rate));
  }
  a.t0 = starts[0] + static_cast<double>(a.skip[0]) / rate;
  for (std::size_t c = 0; c < 4; ++c) {
    const double t = starts[c] + static_cast<double>(a.skip[c]) / rate;
    a.skew = std::max(a.skew, std::abs(t - a.t0));
  }
  return a;
}

/// Median-period check on the standing window.
inline void check_window_rate(std::span<const double> t, double rate,
                              const std::string& context) {
  try {
    check_timestamps(t, rate);
  } catch (const Error& e) {
    throw Error(e.kind(), context + e.what());
  }
}

template <typename Sample>
std::vector<double> times_of(std::span<const Sample> s) {
  std::vector<double> t(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) t[i] = s[i].t;
  return t;
}

inline std::string leg_context(std::size_t leg, const char* sensor) {
  return std::string(kLegName[leg]) + " " + sensor + ": ";
}

}  // namespace gait::detail
