#include <algorithm>
#include <sstream>

#include "gait/error.hpp"
#include "gait/events.hpp"
#include "gait/kernels.hpp"

namespace gait {

namespace {

bool event_order(const MinimumEvent& a, const MinimumEvent& b) {
  if (a.index != b.index) return a.index < b.index;
  if (a.series.side != b.series.side) return a.series.side == Side::Left;
  return a.series.joint == Joint::Knee && b.series.joint == Joint::Hip;
}

std::array<MinimumDetector, 4> make_detectors(const MinimaConfig& c) {
  return {MinimumDetector(series_of(0), c), MinimumDetector(series_of(1), c),
          MinimumDetector(series_of(2), c), MinimumDetector(series_of(3), c)};
}

}  // namespace

StepSegmenter::StepSegmenter(const SegmenterConfig& config)
    : config_(config), detectors_(make_detectors(config.minima)) {
  if (!(config.timeout_s > 0.0)) fail_input("segmentation timeout must be > 0");
}

const StepSegmenter::HistoryEntry& StepSegmenter::at(std::size_t j) const {
  for (auto it = history_.rbegin(); it != history_.rend(); ++it) {
    if (it->j == j) return *it;
  }
  fail_invariant("segmenter history no longer holds sample " +
                 std::to_string(j));
}

void StepSegmenter::push(std::size_t j, double t,
                         const std::array<double, 4>& values,
                         const std::array<double, 4>& derivatives) {
  history_.push_back({j, t, values});

  for (std::size_t c = 0; c < 4; ++c) {
    if (auto e = detectors_[c].push(j, t, values[c], derivatives[c])) {
      held_.push_back(*e);
    }
  }
  // A new candidate sits at j-1 or later and a pending one at its own
  // index, so everything before the earliest of these is final.
  std::size_t next = j - 1;
  for (const MinimumDetector& d : detectors_) {
    if (auto p = d.pending_index()) next = std::min(next, *p);
  }
  if (next == 0 || next - 1 < history_.front().j) return;
  const std::size_t horizon = next - 1;
  release(horizon);
  check_timeout(at(horizon).t);
  while (history_.front().j < horizon) history_.pop_front();
}

void StepSegmenter::finish() {
  release(std::nullopt);
  if (phase_ == Phase::AwaitBackHipMin) {
    ++diag_.discarded_steps;
    std::ostringstream os;
    os << "stream ended while waiting for the back-limb hip minimum of the "
       << "step started at t=" << pending_.t << " s; step discarded";
    diag_.messages.push_back(os.str());
    phase_ = Phase::AwaitFrontKneeMin;
  }
}

std::vector<StepMeasurement> StepSegmenter::take_steps() {
  std::vector<StepMeasurement> out;
  out.swap(ready_);
  return out;
}

void StepSegmenter::release(std::optional<std::size_t> horizon) {
  std::stable_sort(held_.begin(), held_.end(), event_order);
  std::size_t n = 0;
  while (n < held_.size() && (!horizon || held_[n].index <= *horizon)) {
    handle(held_[n]);
    ++n;
  }
  held_.erase(held_.begin(), held_.begin() + static_cast<std::ptrdiff_t>(n));
}

void StepSegmenter::check_timeout(double now) {
  if (phase_ != Phase::AwaitBackHipMin) return;
  if (now - pending_.t <= config_.timeout_s) return;
  ++diag_.discarded_steps;
  std::ostringstream os;
  os << "no back-limb hip minimum within " << config_.timeout_s
     << " s of the front knee minimum at t=" << pending_.t
     << " s; step discarded";
  diag_.messages.push_back(os.str());
  phase_ = Phase::AwaitFrontKneeMin;
  // The front event may have been noise, so either leg can start next.
  expected_front_.reset();
}

void StepSegmenter::complete(Side back, double t, double alpha_b,
                             double knee) {
  StepMeasurement step;
  step.index = next_index_++;
  step.front_side = pending_.side;
  step.t_front_event = pending_.t;
  step.t_back_event = t;
  step.angles.alpha_f = pending_.alpha_f;
  step.angles.beta_f = pending_.beta_f;
  step.angles.alpha_b = alpha_b;
  step.angles.beta_b = std::max(0.0, knee);
  ready_.push_back(step);
  recent_hip_[index_of(back)].reset();
  last_foot_off_[index_of(back)] = t;
  phase_ = Phase::AwaitFrontKneeMin;
  expected_front_ = back;
}

void StepSegmenter::handle(const MinimumEvent& e) {
  check_timeout(e.t);
  const Side side = e.series.side;

  if (e.series.joint == Joint::Hip) {
    const HistoryEntry& h = at(e.index);
    const double knee = h.values[channel_of({side, Joint::Knee})];
    if (phase_ == Phase::AwaitBackHipMin && side != pending_.side &&
        e.t >= pending_.t) {
      complete(side, e.t, e.value, knee);
      return;
    }
    recent_hip_[index_of(side)] = RecentHipMin{e.t, e.value, knee};
    ++diag_.ignored_minima;
    return;
  }

  if (phase_ == Phase::AwaitBackHipMin ||
      (expected_front_ && side != *expected_front_)) {
    ++diag_.ignored_minima;
    return;
  }
  const HistoryEntry& h = at(e.index);
  // A contact needs the thigh ahead of the other one by more than the
  // noise floor and a swing since this leg last left the ground.
  const Side back = other(side);
  const double hip = h.values[channel_of({side, Joint::Hip})];
  const std::optional<double>& off = last_foot_off_[index_of(side)];
  if (hip - h.values[channel_of({back, Joint::Hip})] < config_.minima.prominence_deg ||
      (off && e.t - *off < config_.minima.refractory_s)) {
    ++diag_.ignored_minima;
    return;
  }
  pending_ = {side, e.t, hip, std::max(0.0, e.value)};
  phase_ = Phase::AwaitBackHipMin;

  const std::optional<RecentHipMin>& early = recent_hip_[index_of(back)];
  if (early && pending_.t - early->t <= config_.back_lead_s + 1e-9) {
    // Counted as ignored when it arrived; it is used after all.
    --diag_.ignored_minima;
    complete(back, early->t, early->alpha, early->knee);
  }
}

std::vector<StepMeasurement> segment_steps(const AngleQuad& quad,
                                           const SegmenterConfig& config,
                                           SegmentationDiagnostics* diagnostics) {
  quad.validate();
  const std::size_t n = quad.size();
  StepSegmenter segmenter(config);
  std::vector<StepMeasurement> steps;
  if (n >= 5) {
    std::array<std::vector<double>, 4> d;
    const double h = 1.0 / quad.rate();
    for (std::size_t c = 0; c < 4; ++c) {
      d[c].assign(n, 0.0);
      kernels::five_point_interior(quad.series(series_of(c)).values, h, d[c]);
    }
    for (std::size_t j = 2; j + 2 < n; ++j) {
      std::array<double, 4> values{};
      std::array<double, 4> derivs{};
      for (std::size_t c = 0; c < 4; ++c) {
        values[c] = quad.series(series_of(c)).values[j];
        derivs[c] = d[c][j];
      }
      segmenter.push(j, quad.time(j), values, derivs);
    }
  }
  segmenter.finish();
  steps = segmenter.take_steps();
  if (diagnostics != nullptr) *diagnostics = segmenter.diagnostics();
  return steps;
}

}  // namespace gait
