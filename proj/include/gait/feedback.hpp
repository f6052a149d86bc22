#pragma once

// Walking feedback: persistent left/right step asymmetry, a sustained drop
// in gait velocity, and a sustained drop in step length. Detectors are fed
// strides (or steps) in order and emit each condition once per episode.

#include <cstddef>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "gait/core.hpp"

namespace gait {

enum class FeedbackKind { Asymmetry, VelocityReduction, StepLengthReduction };

std::string_view to_string(FeedbackKind k) noexcept;

struct FeedbackEvent {
  FeedbackKind kind = FeedbackKind::Asymmetry;
  /// Stride index for asymmetry and velocity, step index for step length.
  std::size_t index = 0;
  /// Index at which the condition first appeared.
  std::size_t onset_index = 0;
  std::optional<Side> side;  ///< step-length events only
  double value = 0.0;        ///< percent, m/s or cm
  double threshold = 0.0;    ///< same unit as value
  double t = 0.0;            ///< s, when the event was confirmed
};

struct FeedbackConfig {
  double asym_threshold_pct = kDefaultAsymmetryThresholdPct;
  std::size_t confirm_steps = 5;
  std::size_t baseline_strides = 10;
  std::size_t baseline_steps = 10;  ///< per side
  std::size_t moving_window = 5;
  double velocity_reduction = 0.2;
  std::size_t velocity_confirm = 5;
  double step_reduction = 0.2;
  std::size_t step_confirm = 5;
};

/// Flags a stride above the threshold, then waits for `confirm_steps`
/// further steps and re-evaluates the asymmetry on the left and right step
/// lengths averaged from the onset stride onwards. A run of strides above
/// the threshold is confirmed (or rejected) once.
class AsymmetryDetector {
 public:
  explicit AsymmetryDetector(const FeedbackConfig& config = {});
  std::optional<FeedbackEvent> push(const Stride& stride);

 private:
  FeedbackConfig config_;
  std::size_t seen_ = 0;
  std::optional<std::size_t> onset_;
  std::vector<Stride> window_;
  bool in_episode_ = false;
};

/// Strides after the onset stride needed to cover `confirm_steps` steps.
std::size_t confirmation_strides(std::size_t confirm_steps) noexcept;

/// Baseline from the first strides, then the moving-average velocity must
/// stay below (1 - r) baseline for `velocity_confirm` consecutive strides.
class VelocityTrendDetector {
 public:
  explicit VelocityTrendDetector(const FeedbackConfig& config = {});
  std::optional<FeedbackEvent> push(const Stride& stride);
  std::optional<double> baseline() const noexcept { return baseline_; }

 private:
  FeedbackConfig config_;
  std::vector<double> warmup_;
  std::optional<double> baseline_;
  std::deque<double> recent_;
  std::size_t below_ = 0;
  std::size_t onset_ = 0;
  bool active_ = false;
};

/// Same rule as the velocity trend, applied per side to step lengths.
class StepReductionDetector {
 public:
  explicit StepReductionDetector(const FeedbackConfig& config = {});
  std::optional<FeedbackEvent> push(const StepMeasurement& step);

 private:
  struct PerSide {
    std::vector<double> warmup;
    std::optional<double> baseline;
    std::deque<double> recent;
    std::size_t below = 0;
    std::size_t onset = 0;
    bool active = false;
  };

  FeedbackConfig config_;
  PerSide sides_[2];
};

/// All three detectors behind one interface. Steps go in as they are
/// measured, strides once they are complete.
class FeedbackEngine {
 public:
  explicit FeedbackEngine(const FeedbackConfig& config = {});

  std::vector<FeedbackEvent> on_step(const StepMeasurement& step);
  std::vector<FeedbackEvent> on_stride(const Stride& stride);

 private:
  AsymmetryDetector asymmetry_;
  VelocityTrendDetector velocity_;
  StepReductionDetector steps_;
};

}  // namespace gait
