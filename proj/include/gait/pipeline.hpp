#pragma once

// End-to-end processing of a two-leg trial: offsets, smoothing, hip
// orientation, event segmentation, step lengths, strides and feedback.
// `analyze` works on whole recordings; `StreamProcessor` consumes samples as
// they arrive and produces the same step and stride records.

#include <array>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gait/calibrate.hpp"
#include "gait/core.hpp"
#include "gait/events.hpp"
#include "gait/feedback.hpp"
#include "gait/orientation.hpp"
#include "gait/signal.hpp"

namespace gait {

struct PipelineConfig {
  StaticParams params{30.0, 45.0, 14.0};
  AngleBias bias;
  double madgwick_beta = kDefaultMadgwickBeta;
  std::size_t downsample_imu = kImuDownsample;
  std::size_t downsample_bend = kBendDownsample;
  double imu_rate = kImuNativeRate;
  double bend_rate = kBendNativeRate;
  SegmenterConfig segmenter;
  FeedbackConfig feedback;
  Mounting mounting = Mounting::ZUpXForward;
  /// Leading seconds of every stream used as the standing window.
  double calibration_s = 1.5;
  StillnessLimits stillness;

  void validate() const;
  /// Common output rate after smoothing; throws unless IMU and bend agree.
  double output_rate() const;
};

/// Per-leg raw input.
struct TrialStreams {
  std::array<std::vector<ImuSample>, 2> imu;
  std::array<std::vector<BendSample>, 2> bend;
};

struct SensorOffsets {
  std::array<ImuOffsets, 2> imu;
  std::array<double, 2> bend{};
};

struct PipelineDiagnostics {
  std::vector<std::string> messages;
  std::size_t discarded_steps = 0;
  std::size_t ignored_minima = 0;
  std::size_t unpaired_steps = 0;
  double alignment_skew_s = 0.0;  ///< spread of stream start times
  std::size_t gyro_only_updates = 0;
};

struct AnalysisResult {
  std::vector<StepMeasurement> steps;
  std::vector<Stride> strides;
  std::vector<FeedbackEvent> feedback;
  SensorOffsets offsets;
  PipelineDiagnostics diagnostics;
  double output_rate = 0.0;
};

/// Turns measured steps into lengths, strides and feedback in arrival order.
/// Shared by the batch and streaming paths so both report identical records.
class StepAccumulator {
 public:
  explicit StepAccumulator(const PipelineConfig& config);

  struct Update {
    std::vector<StepMeasurement> steps;
    std::vector<Stride> strides;
    std::vector<FeedbackEvent> feedback;
  };

  /// `step` carries raw event angles; bias and lengths are applied here.
  Update push(StepMeasurement step);
  Update finish();

  const std::vector<StepMeasurement>& steps() const noexcept { return steps_; }
  const std::vector<Stride>& strides() const noexcept { return strides_; }
  const std::vector<FeedbackEvent>& feedback() const noexcept {
    return feedback_;
  }
  std::size_t unpaired() const noexcept { return unpaired_; }

 private:
  void emit_stride(const StepMeasurement* next, Update& u);

  PipelineConfig config_;
  FeedbackEngine engine_;
  std::vector<StepMeasurement> steps_;
  std::vector<Stride> strides_;
  std::vector<FeedbackEvent> feedback_;
  std::optional<StepMeasurement> a_;
  std::optional<StepMeasurement> b_;
  std::size_t unpaired_ = 0;
};

/// Batch analysis of complete recordings.
AnalysisResult analyze(const TrialStreams& trial, const PipelineConfig& config);

/// Four 25 Hz angle traces after smoothing and orientation, aligned on a
/// common grid (exposed for inspection and tests).
AngleQuad angle_traces(const TrialStreams& trial, const PipelineConfig& config,
                       SensorOffsets* offsets = nullptr,
                       PipelineDiagnostics* diagnostics = nullptr);

enum class StreamSource { ImuLeft, ImuRight, BendLeft, BendRight };

/// Causal processor. Samples of each source must arrive in time order;
/// sources may interleave arbitrarily.
class StreamProcessor {
 public:
  explicit StreamProcessor(const PipelineConfig& config);

  StepAccumulator::Update push_imu(Side side, const ImuSample& s);
  StepAccumulator::Update push_bend(Side side, const BendSample& s);
  /// Flushes everything still buffered and closes the trial.
  StepAccumulator::Update finish();

  AnalysisResult result() const;

 private:
  struct BendChannel {
    std::vector<BendSample> window;
    std::optional<double> offset;
    std::optional<double> t_first;
    TimestampMonitor clock;
    std::optional<StreamingWindowMean> mean;
    std::deque<double> out;
  };
  struct ImuChannel {
    std::vector<ImuSample> window;
    std::optional<ImuOffsets> offsets;
    std::optional<double> t_first;
    TimestampMonitor clock;
    std::array<std::optional<StreamingWindowMean>, 6> mean;
    OrientationFilterState filter;
    std::deque<double> out;
  };

  void feed_bend(std::size_t leg, const BendSample& s);
  void feed_imu(std::size_t leg, const ImuSample& s);
  void calibrate_if_ready(bool force);
  void drain(StepAccumulator::Update& u);
  void merge(StepAccumulator::Update& into, StepAccumulator::Update from);

  PipelineConfig config_;
  std::array<ImuChannel, 2> imu_;
  std::array<BendChannel, 2> bend_;
  bool calibrated_ = false;
  bool finished_ = false;
  std::optional<std::array<std::size_t, 4>> skip_;
  std::array<std::deque<double>, 4> aligned_;
  std::size_t next_sample_ = 0;
  double t0_ = 0.0;
  std::deque<std::array<double, 4>> recent_;
  StepSegmenter segmenter_;
  StepAccumulator accumulator_;
  SensorOffsets offsets_;
  PipelineDiagnostics diag_;
};

}  // namespace gait
