#include <algorithm>

#include "gait/error.hpp"
#include "gait/pipeline.hpp"
#include "stages.hpp"

namespace gait {

namespace {

template <typename Sample>
std::span<const Sample> calibration_window(std::span<const Sample> s,
                                           const PipelineConfig& c) {
  std::size_t n = 0;
  while (n < s.size() &&
         detail::in_calibration_window(s[n].t, s.front().t, c)) {
    ++n;
  }
  return s.first(n);
}

template <typename Sample>
void audit_timestamps(std::span<const Sample> s, double rate,
                      const std::string& context, const PipelineConfig& c,
                      PipelineDiagnostics& diag) {
  TimestampMonitor tracker;
  for (const Sample& x : s) tracker.add(x.t, rate, context);
  detail::check_window_rate(detail::times_of(calibration_window(s, c)), rate,
                            context);
  if (auto w = tracker.warning(rate, context)) diag.messages.push_back(*w);
}

// Rethrows module errors with the stream they came from.
template <typename F>
auto with_context(const std::string& context, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), context + e.what());
  }
}

}  // namespace

AngleQuad angle_traces(const TrialStreams& trial, const PipelineConfig& config,
                       SensorOffsets* offsets_out,
                       PipelineDiagnostics* diag_out) {
  config.validate();
  const double rate = config.output_rate();
  PipelineDiagnostics diag;
  SensorOffsets offsets;
  std::array<UniformSeries, 4> channels;

  for (std::size_t leg = 0; leg < 2; ++leg) {
    const std::string imu_ctx = detail::leg_context(leg, "IMU");
    const std::string bend_ctx = detail::leg_context(leg, "bend sensor");

    std::vector<ImuSample> imu(trial.imu[leg].size());
    std::transform(trial.imu[leg].begin(), trial.imu[leg].end(), imu.begin(),
                   [&](const ImuSample& s) { return detail::canonical(s, config); });
    if (imu.empty()) fail_input(imu_ctx + "no samples");
    audit_timestamps<ImuSample>(imu, config.imu_rate, imu_ctx, config, diag);
    offsets.imu[leg] = with_context(imu_ctx, [&] {
      return compute_imu_offsets(calibration_window<ImuSample>(imu, config),
                                 config.stillness);
    });
    for (ImuSample& s : imu) s = subtract_offsets(s, offsets.imu[leg]);
    const ImuSeries smooth = with_context(imu_ctx, [&] {
      return downsample_smooth(std::span<const ImuSample>(imu), config.imu_rate,
                               config.downsample_imu);
    });

    UniformSeries hip;
    hip.t0 = smooth.t0;
    hip.rate = smooth.rate;
    hip.values.resize(smooth.size());
    OrientationFilterState f = detail::initial_filter(config);
    const double dt = detail::imu_step(config);
    for (std::size_t k = 0; k < smooth.size(); ++k) {
      f = madgwick_update(f, smooth.accel_at(k), smooth.gyro_at(k), dt);
      if (f.gyro_only) ++diag.gyro_only_updates;
      hip.values[k] = hip_angle(f.q);
    }
    channels[channel_of({leg == 0 ? Side::Left : Side::Right, Joint::Hip})] =
        std::move(hip);

    std::vector<BendSample> bend = trial.bend[leg];
    if (bend.empty()) fail_input(bend_ctx + "no samples");
    audit_timestamps<BendSample>(bend, config.bend_rate, bend_ctx, config,
                                 diag);
    offsets.bend[leg] = with_context(bend_ctx, [&] {
      return compute_bend_offset(calibration_window<BendSample>(bend, config),
                                 config.stillness);
    });
    for (BendSample& s : bend) s.angle -= offsets.bend[leg];
    channels[channel_of({leg == 0 ? Side::Left : Side::Right, Joint::Knee})] =
        with_context(bend_ctx, [&] {
          return downsample_smooth(std::span<const BendSample>(bend),
                                   config.bend_rate, config.downsample_bend);
        });
  }

  std::array<double, 4> starts{};
  for (std::size_t c = 0; c < 4; ++c) starts[c] = channels[c].t0;
  const detail::Alignment align = detail::align_starts(starts, rate);
  diag.alignment_skew_s = align.skew;

  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (std::size_t c = 0; c < 4; ++c) {
    const std::size_t size = channels[c].size();
    n = std::min(n, size > align.skip[c] ? size - align.skip[c] : 0);
  }
  AngleQuad quad;
  for (std::size_t c = 0; c < 4; ++c) {
    UniformSeries& s = quad.series(series_of(c));
    s.t0 = align.t0;
    s.rate = rate;
    const auto first = channels[c].values.begin() +
                       static_cast<std::ptrdiff_t>(align.skip[c]);
    s.values.assign(first, first + static_cast<std::ptrdiff_t>(n));
  }
  if (offsets_out != nullptr) *offsets_out = offsets;
  if (diag_out != nullptr) *diag_out = std::move(diag);
  return quad;
}

AnalysisResult analyze(const TrialStreams& trial, const PipelineConfig& config) {
  AnalysisResult out;
  out.output_rate = config.output_rate();
  const AngleQuad quad =
      angle_traces(trial, config, &out.offsets, &out.diagnostics);

  SegmentationDiagnostics seg;
  const std::vector<StepMeasurement> steps =
      segment_steps(quad, config.segmenter, &seg);
  out.diagnostics.discarded_steps = seg.discarded_steps;
  out.diagnostics.ignored_minima = seg.ignored_minima;
  for (const std::string& m : seg.messages) out.diagnostics.messages.push_back(m);

  StepAccumulator acc(config);
  for (const StepMeasurement& s : steps) acc.push(s);
  acc.finish();
  out.steps = acc.steps();
  out.strides = acc.strides();
  out.feedback = acc.feedback();
  out.diagnostics.unpaired_steps = acc.unpaired();
  return out;
}

}  // namespace gait
