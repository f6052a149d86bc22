#include <cmath>

#include "gait/error.hpp"
#include "gait/pipeline.hpp"

namespace gait {

void PipelineConfig::validate() const {
  gait::validate(params);
  if (!(madgwick_beta > 0.0) || !std::isfinite(madgwick_beta)) {
    fail_input("madgwick_beta must be positive");
  }
  if (downsample_imu == 0 || downsample_bend == 0) {
    fail_input("downsampling factors must be at least 1");
  }
  if (!(imu_rate > 0.0) || !(bend_rate > 0.0)) {
    fail_input("sample rates must be positive");
  }
  if (!(segmenter.minima.refractory_s >= 0.0) ||
      !(segmenter.minima.prominence_deg >= 0.0) ||
      !(segmenter.timeout_s > 0.0)) {
    fail_input("event detection settings must be non-negative");
  }
  if (!(feedback.asym_threshold_pct > 0.0)) {
    fail_input("asym_threshold_pct must be positive");
  }
  if (!(calibration_s > 0.0)) fail_input("calibration window must be positive");
  output_rate();
}

double PipelineConfig::output_rate() const {
  const double imu = imu_rate / static_cast<double>(downsample_imu);
  const double bend = bend_rate / static_cast<double>(downsample_bend);
  if (std::abs(imu - bend) > 1e-9 * imu) {
    fail_input("IMU and bend streams smooth to different rates (" +
               std::to_string(imu) + " Hz vs " + std::to_string(bend) +
               " Hz); adjust downsample_imu or downsample_bend");
  }
  return imu;
}

StepAccumulator::StepAccumulator(const PipelineConfig& config)
    : config_(config), engine_(config.feedback) {}

void StepAccumulator::emit_stride(const StepMeasurement* next, Update& u) {
  strides_.push_back(make_stride(strides_.size(), *a_, *b_, next));
  assign_velocity(strides_, strides_.size() - 1);
  const Stride& s = strides_.back();
  u.strides.push_back(s);
  for (FeedbackEvent& e : engine_.on_stride(s)) {
    feedback_.push_back(e);
    u.feedback.push_back(e);
  }
  a_.reset();
  b_.reset();
}

StepAccumulator::Update StepAccumulator::push(StepMeasurement step) {
  Update u;
  step.angles = apply_bias(step.angles, config_.bias);
  step.length = step_length(config_.params, step.angles).total;
  steps_.push_back(step);
  u.steps.push_back(step);
  for (FeedbackEvent& e : engine_.on_step(step)) {
    feedback_.push_back(e);
    u.feedback.push_back(e);
  }

  // Strides pair alternating steps; a repeated side breaks the pairing.
  if (a_ && b_) {
    const bool continues = step.front_side == a_->front_side;
    emit_stride(continues ? &step : nullptr, u);
  }
  if (!a_) {
    a_ = step;
  } else if (step.front_side != a_->front_side) {
    b_ = step;
  } else {
    ++unpaired_;
    a_ = step;
  }
  return u;
}

StepAccumulator::Update StepAccumulator::finish() {
  Update u;
  if (a_ && b_) emit_stride(nullptr, u);
  if (a_) ++unpaired_;
  a_.reset();
  return u;
}

}  // namespace gait
