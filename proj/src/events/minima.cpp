#include "gait/error.hpp"
#include "gait/events.hpp"
#include "gait/kernels.hpp"

namespace gait {

MinimumDetector::MinimumDetector(SeriesId id, const MinimaConfig& config)
    : id_(id), config_(config) {
  if (!(config.refractory_s >= 0.0)) fail_input("refractory must be >= 0");
  if (!(config.prominence_deg >= 0.0)) fail_input("prominence must be >= 0");
  if (!(config.max_wait_s > 0.0)) fail_input("minimum wait must be > 0");
}

std::optional<MinimumEvent> MinimumDetector::push(std::size_t index, double t,
                                                  double value,
                                                  double derivative) {
  const Sample cur{index, t, value, derivative};
  std::optional<MinimumEvent> accepted;

  if (candidate_) {
    if (value - candidate_->value >= config_.prominence_deg) {
      accepted = MinimumEvent{id_, candidate_->index, candidate_->t,
                              candidate_->value};
      last_accepted_t_ = candidate_->t;
      running_max_ = value;
      candidate_.reset();
    } else if (t - candidate_->t > config_.max_wait_s) {
      candidate_.reset();
    }
  }

  if (prev_ && prev_->derivative <= 0.0 && derivative > 0.0) {
    const Sample& c = prev_->value <= value ? *prev_ : cur;
    const bool refractory_ok =
        !last_accepted_t_ || c.t - *last_accepted_t_ >= config_.refractory_s;
    const bool prominent = running_max_ - c.value >= config_.prominence_deg;
    if (refractory_ok && prominent && (!candidate_ || c.value < candidate_->value)) {
      candidate_ = c;
    }
  }
  if (value > running_max_) running_max_ = value;
  prev_ = cur;
  return accepted;
}

std::optional<std::size_t> MinimumDetector::pending_index() const noexcept {
  if (!candidate_) return std::nullopt;
  return candidate_->index;
}

std::vector<MinimumEvent> detect_minima(const UniformSeries& series,
                                        double refractory_s,
                                        double prominence_deg, SeriesId id) {
  std::vector<MinimumEvent> events;
  const std::size_t n = series.size();
  if (n < 5) return events;
  std::vector<double> d(n, 0.0);
  kernels::five_point_interior(series.values, 1.0 / series.rate, d);
  MinimaConfig config;
  config.refractory_s = refractory_s;
  config.prominence_deg = prominence_deg;
  MinimumDetector detector(id, config);
  for (std::size_t j = 2; j + 2 < n; ++j) {
    if (auto e = detector.push(j, series.time(j), series.values[j], d[j])) {
      events.push_back(*e);
    }
  }
  return events;
}

}  // namespace gait
