#include <algorithm>
#include <cmath>

#include "gait/error.hpp"
#include "gait/kernels.hpp"
#include "gait/pipeline.hpp"
#include "stages.hpp"

namespace gait {

namespace {

constexpr std::size_t kStencil = 5;

}  // namespace

StreamProcessor::StreamProcessor(const PipelineConfig& config)
    : config_(config), segmenter_(config.segmenter), accumulator_(config) {
  config_.validate();
  for (ImuChannel& c : imu_) c.filter = detail::initial_filter(config_);
}

void StreamProcessor::merge(StepAccumulator::Update& into,
                            StepAccumulator::Update from) {
  into.steps.insert(into.steps.end(), from.steps.begin(), from.steps.end());
  into.strides.insert(into.strides.end(), from.strides.begin(),
                      from.strides.end());
  into.feedback.insert(into.feedback.end(), from.feedback.begin(),
                       from.feedback.end());
}

void StreamProcessor::feed_imu(std::size_t leg, const ImuSample& raw) {
  ImuChannel& c = imu_[leg];
  const ImuSample s = subtract_offsets(raw, *c.offsets);
  std::array<std::optional<double>, 6> v;
  for (std::size_t a = 0; a < 3; ++a) {
    v[a] = c.mean[a]->push(s.accel[a]);
    v[a + 3] = c.mean[a + 3]->push(s.gyro[a]);
  }
  if (!v[0]) return;
  const Vec3 accel{*v[0], *v[1], *v[2]};
  const Vec3 gyro{*v[3], *v[4], *v[5]};
  c.filter = madgwick_update(c.filter, accel, gyro, detail::imu_step(config_));
  if (c.filter.gyro_only) ++diag_.gyro_only_updates;
  c.out.push_back(hip_angle(c.filter.q));
}

void StreamProcessor::feed_bend(std::size_t leg, const BendSample& raw) {
  BendChannel& c = bend_[leg];
  if (auto v = c.mean->push(raw.angle - *c.offset)) c.out.push_back(*v);
}

void StreamProcessor::calibrate_if_ready(bool force) {
  for (std::size_t leg = 0; leg < 2; ++leg) {
    ImuChannel& imu = imu_[leg];
    if (!imu.offsets && imu.t_first &&
        (force || !detail::in_calibration_window(imu.window.back().t,
                                                 *imu.t_first, config_))) {
      const std::string ctx = detail::leg_context(leg, "IMU");
      auto end = std::find_if(imu.window.begin(), imu.window.end(),
                              [&](const ImuSample& s) {
                                return !detail::in_calibration_window(
                                    s.t, *imu.t_first, config_);
                              });
      const std::span<const ImuSample> win(
          imu.window.data(), static_cast<std::size_t>(end - imu.window.begin()));
      detail::check_window_rate(detail::times_of(win), config_.imu_rate, ctx);
      try {
        imu.offsets = compute_imu_offsets(
            std::span<const ImuSample>(imu.window.data(),
                                       static_cast<std::size_t>(
                                           end - imu.window.begin())),
            config_.stillness);
      } catch (const Error& e) {
        throw Error(e.kind(), ctx + e.what());
      }
      offsets_.imu[leg] = *imu.offsets;
      for (auto& m : imu.mean) m.emplace(config_.downsample_imu);
      for (const ImuSample& s : imu.window) feed_imu(leg, s);
      imu.window.clear();
      imu.window.shrink_to_fit();
    }

    BendChannel& bend = bend_[leg];
    if (!bend.offset && bend.t_first &&
        (force || !detail::in_calibration_window(bend.window.back().t,
                                                 *bend.t_first, config_))) {
      const std::string ctx = detail::leg_context(leg, "bend sensor");
      auto end = std::find_if(bend.window.begin(), bend.window.end(),
                              [&](const BendSample& s) {
                                return !detail::in_calibration_window(
                                    s.t, *bend.t_first, config_);
                              });
      const std::span<const BendSample> win(
          bend.window.data(),
          static_cast<std::size_t>(end - bend.window.begin()));
      detail::check_window_rate(detail::times_of(win), config_.bend_rate, ctx);
      try {
        bend.offset = compute_bend_offset(
            std::span<const BendSample>(bend.window.data(),
                                        static_cast<std::size_t>(
                                            end - bend.window.begin())),
            config_.stillness);
      } catch (const Error& e) {
        throw Error(e.kind(), ctx + e.what());
      }
      offsets_.bend[leg] = *bend.offset;
      bend.mean.emplace(config_.downsample_bend);
      for (const BendSample& s : bend.window) feed_bend(leg, s);
      bend.window.clear();
      bend.window.shrink_to_fit();
    }
  }
}

void StreamProcessor::drain(StepAccumulator::Update& u) {
  if (!skip_) {
    bool known = true;
    std::array<double, 4> starts{};
    for (std::size_t leg = 0; leg < 2; ++leg) {
      const Side side = leg == 0 ? Side::Left : Side::Right;
      known = known && imu_[leg].t_first && bend_[leg].t_first;
      if (!known) return;
      starts[channel_of({side, Joint::Hip})] = detail::smoothed_start(
          *imu_[leg].t_first, config_.downsample_imu, config_.imu_rate);
      starts[channel_of({side, Joint::Knee})] = detail::smoothed_start(
          *bend_[leg].t_first, config_.downsample_bend, config_.bend_rate);
    }
    const detail::Alignment a =
        detail::align_starts(starts, config_.output_rate());
    skip_ = a.skip;
    t0_ = a.t0;
    diag_.alignment_skew_s = a.skew;
  }

  auto source = [&](std::size_t c) -> std::deque<double>& {
    const SeriesId id = series_of(c);
    const std::size_t leg = index_of(id.side);
    return id.joint == Joint::Knee ? bend_[leg].out : imu_[leg].out;
  };
  for (std::size_t c = 0; c < 4; ++c) {
    std::deque<double>& q = source(c);
    std::size_t& skip = (*skip_)[c];
    while (skip > 0 && !q.empty()) {
      q.pop_front();
      --skip;
    }
  }

  const double rate = config_.output_rate();
  const double h = 1.0 / rate;
  for (;;) {
    for (std::size_t c = 0; c < 4; ++c) {
      if ((*skip_)[c] > 0 || source(c).empty()) return;
    }
    std::array<double, 4> v{};
    for (std::size_t c = 0; c < 4; ++c) {
      v[c] = source(c).front();
      source(c).pop_front();
    }
    recent_.push_back(v);
    if (recent_.size() > kStencil) recent_.pop_front();
    const std::size_t k = next_sample_++;
    if (k + 1 < kStencil) continue;

    const std::size_t j = k - 2;
    std::array<double, 4> d{};
    for (std::size_t c = 0; c < 4; ++c) {
      d[c] = kernels::five_point_one(recent_[0][c], recent_[1][c],
                                     recent_[3][c], recent_[4][c], h);
    }
    segmenter_.push(j, t0_ + static_cast<double>(j) / rate, recent_[2], d);
    for (StepMeasurement& s : segmenter_.take_steps()) {
      merge(u, accumulator_.push(s));
    }
  }
}

StepAccumulator::Update StreamProcessor::push_imu(Side side, const ImuSample& raw) {
  if (finished_) fail_input("sample after end of stream");
  const std::size_t leg = index_of(side);
  ImuChannel& c = imu_[leg];
  const ImuSample s = detail::canonical(raw, config_);
  c.clock.add(s.t, config_.imu_rate, detail::leg_context(leg, "IMU"));
  if (!c.t_first) c.t_first = s.t;

  StepAccumulator::Update u;
  if (!c.offsets) {
    c.window.push_back(s);
    calibrate_if_ready(false);
  } else {
    feed_imu(leg, s);
  }
  drain(u);
  return u;
}

StepAccumulator::Update StreamProcessor::push_bend(Side side,
                                                   const BendSample& s) {
  if (finished_) fail_input("sample after end of stream");
  const std::size_t leg = index_of(side);
  BendChannel& c = bend_[leg];
  c.clock.add(s.t, config_.bend_rate, detail::leg_context(leg, "bend sensor"));
  if (!c.t_first) c.t_first = s.t;

  StepAccumulator::Update u;
  if (!c.offset) {
    c.window.push_back(s);
    calibrate_if_ready(false);
  } else {
    feed_bend(leg, s);
  }
  drain(u);
  return u;
}

StepAccumulator::Update StreamProcessor::finish() {
  StepAccumulator::Update u;
  if (finished_) return u;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    if (!imu_[leg].t_first) {
      fail_input(detail::leg_context(leg, "IMU") + "no samples");
    }
    if (!bend_[leg].t_first) {
      fail_input(detail::leg_context(leg, "bend sensor") + "no samples");
    }
  }
  calibrate_if_ready(true);
  drain(u);
  segmenter_.finish();
  for (StepMeasurement& s : segmenter_.take_steps()) {
    merge(u, accumulator_.push(s));
  }
  merge(u, accumulator_.finish());
  for (std::size_t leg = 0; leg < 2; ++leg) {
    if (auto w = imu_[leg].clock.warning(config_.imu_rate,
                                         detail::leg_context(leg, "IMU"))) {
      diag_.messages.push_back(*w);
    }
    if (auto w = bend_[leg].clock.warning(
            config_.bend_rate, detail::leg_context(leg, "bend sensor"))) {
      diag_.messages.push_back(*w);
    }
  }
  const SegmentationDiagnostics& seg = segmenter_.diagnostics();
  diag_.discarded_steps = seg.discarded_steps;
  diag_.ignored_minima = seg.ignored_minima;
  diag_.messages.insert(diag_.messages.end(), seg.messages.begin(),
                        seg.messages.end());
  diag_.unpaired_steps = accumulator_.unpaired();
  finished_ = true;
  return u;
}

AnalysisResult StreamProcessor::result() const {
  AnalysisResult out;
  out.steps = accumulator_.steps();
  out.strides = accumulator_.strides();
  out.feedback = accumulator_.feedback();
  out.offsets = offsets_;
  out.diagnostics = diag_;
  out.output_rate = config_.output_rate();
  return out;
}

}  // namespace gait
