#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "gait/error.hpp"
#include "gait/kernels.hpp"
#include "gait/signal.hpp"

namespace gait {

TimestampReport check_timestamps(std::span<const double> t,
                                 double nominal_rate) {
  TimestampReport report;
  if (t.size() < 2) return report;
  const double period = 1.0 / nominal_rate;

  std::vector<double> dt(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i) {
    dt[i - 1] = t[i] - t[i - 1];
    if (dt[i - 1] < -kJitterWarnFraction * period) {
      std::ostringstream os;
      os << "timestamps go backwards at sample " << i << " (" << t[i - 1]
         << " -> " << t[i] << ")";
      fail_input(os.str());
    }
    if (dt[i - 1] < 0.0) ++report.backwards;
    report.max_jitter_s =
        std::max(report.max_jitter_s, std::abs(dt[i - 1] - period));
  }
  auto mid = dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2);
  std::nth_element(dt.begin(), mid, dt.end());
  if (std::abs(*mid - period) > 0.05 * period) {
    std::ostringstream os;
    os << "median sample period " << *mid << " s does not match the nominal "
       << nominal_rate << " Hz";
    fail_input(os.str());
  }
  report.jitter_warning = report.max_jitter_s > kJitterWarnFraction * period;
  return report;
}

void TimestampMonitor::add(double t, double nominal_rate,
                           const std::string& context) {
  const double period = 1.0 / nominal_rate;
  if (last_) {
    const double dt = t - *last_;
    if (dt < -kJitterWarnFraction * period) {
      std::ostringstream os;
      os << context << "timestamps go backwards (" << *last_ << " -> " << t
         << ")";
      fail_input(os.str());
    }
    max_jitter_ = std::max(max_jitter_, std::abs(dt - period));
  }
  last_ = t;
}

std::optional<std::string> TimestampMonitor::warning(
    double nominal_rate, const std::string& context) const {
  if (!(max_jitter_ > kJitterWarnFraction / nominal_rate)) return std::nullopt;
  std::ostringstream os;
  os << context << "timestamp jitter up to " << max_jitter_ * 1e3 << " ms";
  return os.str();
}

namespace {

void check_downsample_args(std::size_t n, std::size_t m) {
  if (n == 0) fail_input("cannot smooth an empty stream");
  if (m == 0) fail_input("downsampling factor must be at least 1");
  if (n < 2 * m) {
    fail_input("downsampling factor " + std::to_string(m) +
               " is larger than half the stream (" + std::to_string(n) +
               " samples)");
  }
}

}  // namespace

UniformSeries downsample_smooth(std::span<const double> values, double t_first,
                                double native_rate, std::size_t m) {
  check_downsample_args(values.size(), m);
  UniformSeries out;
  out.rate = native_rate / static_cast<double>(m);
  out.t0 = t_first + static_cast<double>(m) / native_rate;
  out.values.resize(kernels::window_mean_count(values.size(), m));
  kernels::window_mean(values, m, out.values);
  return out;
}

UniformSeries downsample_smooth(std::span<const BendSample> stream,
                                double native_rate, std::size_t m) {
  check_downsample_args(stream.size(), m);
  std::vector<double> column(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) column[i] = stream[i].angle;
  return downsample_smooth(column, stream.front().t, native_rate, m);
}

ImuSeries downsample_smooth(std::span<const ImuSample> stream,
                            double native_rate, std::size_t m) {
  check_downsample_args(stream.size(), m);
  ImuSeries out;
  out.rate = native_rate / static_cast<double>(m);
  out.t0 = stream.front().t + static_cast<double>(m) / native_rate;
  const std::size_t count = kernels::window_mean_count(stream.size(), m);
  std::vector<double> column(stream.size());
  for (std::size_t axis = 0; axis < 3; ++axis) {
    for (std::size_t i = 0; i < stream.size(); ++i) {
      column[i] = stream[i].accel[axis];
    }
    out.accel[axis].resize(count);
    kernels::window_mean(column, m, out.accel[axis]);
    for (std::size_t i = 0; i < stream.size(); ++i) {
      column[i] = stream[i].gyro[axis];
    }
    out.gyro[axis].resize(count);
    kernels::window_mean(column, m, out.gyro[axis]);
  }
  return out;
}

StreamingWindowMean::StreamingWindowMean(std::size_t m) : m_(m) {
  if (m == 0) fail_input("downsampling factor must be at least 1");
  window_.reserve(2 * m);
}

std::optional<double> StreamingWindowMean::push(double x) {
  window_.push_back(x);
  if (window_.size() < 2 * m_) return std::nullopt;
  const double mean = kernels::window_mean_one(window_.data(), m_);
  window_.erase(window_.begin(),
                window_.begin() + static_cast<std::ptrdiff_t>(m_));
  ++emitted_;
  return mean;
}

}  // namespace gait
