#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gait/events.hpp"
#include "gait/synth.hpp"

using namespace gait;

namespace {

constexpr double kPi = std::numbers::pi;

UniformSeries sampled(double rate, double seconds, auto f) {
  UniformSeries s;
  s.rate = rate;
  const auto n = static_cast<std::size_t>(std::lround(seconds * rate));
  for (std::size_t k = 0; k < n; ++k) s.values.push_back(f(s.time(k)));
  return s;
}

// 20 degree cosine with troughs at t = phase + 0, 1, 2, ...
auto trough_wave(double phase_s = 0.0) {
  return [phase_s](double t) { return 20.0 + 20.0 * std::cos(2.0 * kPi * (t - phase_s) + kPi); };
}

GaitProfile healthy(std::size_t steps) {
  GaitProfile p;
  p.step_lengths = constant_lengths(steps, 60.0);
  p.beta_f_spread = 2.0;
  p.beta_b_spread = 2.0;
  p.alpha_b_ratio_spread = 0.05;
  return p;
}

}  // namespace

TEST_CASE("five-point derivative") {
  const auto c = five_point_derivative(sampled(25, 4, [](double) { return 3.0; }));
  for (double v : c.values.values) CHECK(v == 0.0);

  const auto lin = five_point_derivative(sampled(25, 4, [](double t) { return 2.0 * t; }));
  for (std::size_t k = 2; k + 2 < lin.values.size(); ++k) {
    CHECK(lin.values.values[k] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(lin.approximate(k));
  }
  CHECK(lin.approximate(0));
  CHECK(lin.approximate(lin.values.size() - 1));

  const auto s = sampled(25, 4, [](double t) { return std::sin(2.0 * kPi * t); });
  const auto d = five_point_derivative(s);
  double worst = 0.0;
  for (std::size_t k = 2; k + 2 < s.size(); ++k) {
    worst = std::max(worst, std::abs(d.values.values[k] - 2.0 * kPi * std::cos(2.0 * kPi * s.time(k))));
  }
  CHECK(worst < 1e-3);
  CHECK_THROWS(five_point_derivative(sampled(25, 0.16, [](double) { return 0.0; })));
}

TEST_CASE("minima of monotone and periodic series") {
  CHECK(detect_minima(sampled(25, 4, [](double t) { return t; }), 0.3, 1.0).empty());

  const auto s = sampled(25, 10, trough_wave());
  const auto m = detect_minima(s, 0.3, 1.0);
  REQUIRE(m.size() == 9);  // the trough at t = 0 has no central derivative
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(std::abs(m[i].t - (1.0 + static_cast<double>(i))) <= 0.04 + 1e-9);
    CHECK(m[i].value == s.values[m[i].index]);
  }
}

TEST_CASE("noise does not add minima") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> noise(0.0, 0.2);
  auto s = sampled(25, 60, trough_wave());
  for (double& v : s.values) v += noise(rng);
  const auto m = detect_minima(s, 0.3, 1.0);
  CHECK(m.size() == 59);
  for (std::size_t i = 0; i < m.size(); ++i) {
    CHECK(std::abs(m[i].t - (1.0 + static_cast<double>(i))) <= 0.08 + 1e-9);
  }
}

TEST_CASE("doubling the sample rate moves minima by under one original sample") {
  for (double phase : {0.0, 0.013, 0.021, 0.033}) {
    const auto a = detect_minima(sampled(25, 10, trough_wave(phase)), 0.3, 1.0);
    const auto b = detect_minima(sampled(50, 10, trough_wave(phase)), 0.3, 1.0);
    REQUIRE(a.size() <= b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i].t - b[i].t) < 0.04);
  }
}

TEST_CASE("segmenter recovers synthetic events") {
  const SynthAngles angles = synthesize_angles(healthy(200));
  const AngleQuad quad = angles.sample(25.0);
  SegmentationDiagnostics diag;
  const auto steps = segment_steps(quad, {}, &diag);
  const auto& truth = angles.truth.steps;
  REQUIRE(steps.size() == truth.size());
  CHECK(diag.discarded_steps == 0);
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CAPTURE(i);
    CHECK(steps[i].front_side == truth[i].side);
    CHECK(std::abs(steps[i].t_front_event - truth[i].t_front) <= 0.04 + 1e-9);
    CHECK(std::abs(steps[i].t_back_event - truth[i].t_back) <= 0.04 + 1e-9);
    if (i > 0) CHECK(steps[i].front_side != steps[i - 1].front_side);
    const double gap = steps[i].t_back_event - steps[i].t_front_event;
    CHECK(gap > -SegmenterConfig{}.back_lead_s - 1e-9);
    CHECK(gap <= SegmenterConfig{}.timeout_s);

    // Angles are the series values at the event samples, no interpolation.
    const auto k = static_cast<std::size_t>(std::lround(steps[i].t_front_event * 25.0));
    const std::size_t front = index_of(steps[i].front_side);
    CHECK(steps[i].angles.beta_f == std::max(0.0, quad.knee[front].values[k]));
    CHECK(steps[i].angles.alpha_f == quad.hip[front].values[k]);
  }
}

TEST_CASE("missing back-limb minimum times out") {
  AngleQuad q;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    q.knee[leg] = sampled(25, 12, trough_wave(0.5 * static_cast<double>(leg)));
  }
  // Left thigh always ahead; neither hip ever turns around.
  q.hip[0] = sampled(25, 12, [](double t) { return 5.0 + t; });
  q.hip[1] = sampled(25, 12, [](double t) { return 5.0 - t; });
  SegmentationDiagnostics diag;
  const auto steps = segment_steps(q, {}, &diag);
  CHECK(steps.empty());
  CHECK(diag.discarded_steps > 0);
  REQUIRE_FALSE(diag.messages.empty());
  CHECK(diag.messages.front().find("discarded") != std::string::npos);
}

TEST_CASE("simultaneous knee minima: the leading thigh is the front limb") {
  for (Side lead : {Side::Left, Side::Right}) {
    AngleQuad q;
    for (std::size_t leg = 0; leg < 2; ++leg) {
      const double ahead = leg == index_of(lead) ? 3.0 : 0.0;
      q.knee[leg] = sampled(25, 6, trough_wave());
      q.hip[leg] = sampled(25, 6, [&](double t) { return trough_wave(0.2)(t) + ahead; });
    }
    const auto steps = segment_steps(q, {});
    REQUIRE_FALSE(steps.empty());
    CHECK(steps.front().front_side == lead);
  }
}

TEST_CASE("standing noise starts no steps") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.2);
  AngleQuad q;
  for (std::size_t leg = 0; leg < 2; ++leg) {
    q.knee[leg] = sampled(25, 120, [](double) { return 0.0; });
    q.hip[leg] = sampled(25, 120, [](double) { return 0.0; });
  }
  for (auto* side : {&q.knee, &q.hip}) {
    for (UniformSeries& s : *side) {
      for (double& v : s.values) v += noise(rng);
    }
  }
  CHECK(segment_steps(q, {}).empty());
}

TEST_CASE("a stance-knee wobble after foot-off is not a contact") {
  const SynthAngles angles = synthesize_angles(healthy(120));
  AngleQuad quad = angles.sample(25.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.2);
  for (auto* side : {&quad.knee, &quad.hip}) {
    for (UniformSeries& s : *side) {
      for (double& v : s.values) v += noise(rng);
    }
  }
  const auto steps = segment_steps(quad, {});
  REQUIRE(steps.size() == angles.truth.steps.size());
  for (std::size_t i = 0; i < steps.size(); ++i) {
    CHECK(steps[i].front_side == angles.truth.steps[i].side);
    CHECK(std::abs(steps[i].t_front_event - angles.truth.steps[i].t_front) < 0.2);
  }
}

TEST_CASE("causal segmenter matches the whole-series helper") {
  const AngleQuad quad = synthesize_angles(healthy(30)).sample(25.0);
  const auto batch = segment_steps(quad, {});
  StepSegmenter seg;
  std::array<DerivativeSeries, 4> d{
      five_point_derivative(quad.series(series_of(0))), five_point_derivative(quad.series(series_of(1))),
      five_point_derivative(quad.series(series_of(2))), five_point_derivative(quad.series(series_of(3)))};
  std::vector<StepMeasurement> live;
  for (std::size_t j = 2; j + 2 < quad.size(); ++j) {
    std::array<double, 4> v{}, dv{};
    for (std::size_t c = 0; c < 4; ++c) {
      v[c] = quad.series(series_of(c)).values[j];
      dv[c] = d[c].values.values[j];
    }
    seg.push(j, quad.time(j), v, dv);
    for (auto& s : seg.take_steps()) live.push_back(s);
  }
  seg.finish();
  for (auto& s : seg.take_steps()) live.push_back(s);
  REQUIRE(live.size() == batch.size());
  for (std::size_t i = 0; i < live.size(); ++i) {
    CHECK(live[i].angles == batch[i].angles);
    CHECK(live[i].t_front_event == batch[i].t_front_event);
  }
}
