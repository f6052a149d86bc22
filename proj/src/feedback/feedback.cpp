#include <numeric>

#include "gait/feedback.hpp"

namespace gait {

std::string_view to_string(FeedbackKind k) noexcept {
  switch (k) {
    case FeedbackKind::Asymmetry: return "asymmetry";
    case FeedbackKind::VelocityReduction: return "velocity_reduction";
    case FeedbackKind::StepLengthReduction: return "step_length_reduction";
  }
  return "asymmetry";
}

std::size_t confirmation_strides(std::size_t confirm_steps) noexcept {
  return (confirm_steps + 1) / 2;
}

namespace {

double mean(const auto& values) {
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

}  // namespace

AsymmetryDetector::AsymmetryDetector(const FeedbackConfig& config)
    : config_(config) {}

std::optional<FeedbackEvent> AsymmetryDetector::push(const Stride& stride) {
  const std::size_t position = seen_++;
  if (position < config_.baseline_strides) return std::nullopt;

  const double percent = gait_asymmetry(stride).percent;
  const double threshold = config_.asym_threshold_pct;
  const bool above = percent > threshold;

  if (!onset_) {
    // One confirmation per run of strides above the threshold.
    if (!above) {
      in_episode_ = false;
      return std::nullopt;
    }
    if (in_episode_) return std::nullopt;
    in_episode_ = true;
    onset_ = stride.index;
    window_.clear();
  } else if (!above) {
    in_episode_ = false;
  }
  window_.push_back(stride);
  if (window_.size() <= confirmation_strides(config_.confirm_steps)) {
    return std::nullopt;
  }

  double left = 0.0;
  double right = 0.0;
  for (const Stride& s : window_) {
    left += s.left_length();
    right += s.right_length();
  }
  const double averaged = asymmetry_percent(left, right);
  const std::size_t onset = *onset_;
  onset_.reset();
  window_.clear();
  if (averaged <= threshold) return std::nullopt;

  return FeedbackEvent{FeedbackKind::Asymmetry,
                       stride.index,
                       onset,
                       std::nullopt,
                       averaged,
                       threshold,
                       stride.step_b.t_back_event};
}

VelocityTrendDetector::VelocityTrendDetector(const FeedbackConfig& config)
    : config_(config) {}

std::optional<FeedbackEvent> VelocityTrendDetector::push(const Stride& stride) {
  if (!baseline_) {
    warmup_.push_back(stride.velocity);
    if (warmup_.size() >= config_.baseline_strides) baseline_ = mean(warmup_);
    return std::nullopt;
  }
  recent_.push_back(stride.velocity);
  if (recent_.size() > config_.moving_window) recent_.pop_front();
  const double average = mean(recent_);
  const double limit = (1.0 - config_.velocity_reduction) * *baseline_;

  if (average >= limit) {
    below_ = 0;
    active_ = false;
    return std::nullopt;
  }
  if (below_++ == 0) onset_ = stride.index;
  if (active_ || below_ < config_.velocity_confirm) return std::nullopt;
  active_ = true;
  return FeedbackEvent{FeedbackKind::VelocityReduction,
                       stride.index,
                       onset_,
                       std::nullopt,
                       average,
                       limit,
                       stride.step_b.t_back_event};
}

StepReductionDetector::StepReductionDetector(const FeedbackConfig& config)
    : config_(config) {}

std::optional<FeedbackEvent> StepReductionDetector::push(
    const StepMeasurement& step) {
  PerSide& s = sides_[index_of(step.front_side)];
  if (!s.baseline) {
    s.warmup.push_back(step.length);
    if (s.warmup.size() >= config_.baseline_steps) s.baseline = mean(s.warmup);
    return std::nullopt;
  }
  s.recent.push_back(step.length);
  if (s.recent.size() > config_.moving_window) s.recent.pop_front();
  const double average = mean(s.recent);
  const double limit = (1.0 - config_.step_reduction) * *s.baseline;

  if (average >= limit) {
    s.below = 0;
    s.active = false;
    return std::nullopt;
  }
  if (s.below++ == 0) s.onset = step.index;
  if (s.active || s.below < config_.step_confirm) return std::nullopt;
  s.active = true;
  return FeedbackEvent{FeedbackKind::StepLengthReduction,
                       step.index,
                       s.onset,
                       step.front_side,
                       average,
                       limit,
                       step.t_back_event};
}

FeedbackEngine::FeedbackEngine(const FeedbackConfig& config)
    : asymmetry_(config), velocity_(config), steps_(config) {}

std::vector<FeedbackEvent> FeedbackEngine::on_step(const StepMeasurement& step) {
  std::vector<FeedbackEvent> out;
  if (auto e = steps_.push(step)) out.push_back(*e);
  return out;
}

std::vector<FeedbackEvent> FeedbackEngine::on_stride(const Stride& stride) {
  std::vector<FeedbackEvent> out;
  if (auto e = asymmetry_.push(stride)) out.push_back(*e);
  if (auto e = velocity_.push(stride)) out.push_back(*e);
  return out;
}

}  // namespace gait
