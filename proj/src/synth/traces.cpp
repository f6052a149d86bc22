#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "gait/error.hpp"
#include "gait/synth.hpp"

namespace gait {

double eased_cosine(double u) noexcept {
  const double w = 0.5 * (1.0 - std::cos(std::numbers::pi * u));
  return 0.5 * (1.0 - std::cos(std::numbers::pi * w));
}

double eased_cosine_slope(double u) noexcept {
  const double pi = std::numbers::pi;
  const double w = 0.5 * (1.0 - std::cos(pi * u));
  return 0.25 * pi * pi * std::sin(pi * w) * std::sin(pi * u);
}

AngleTrace AngleTrace::constant(double deg) {
  return {[deg](double) { return deg; }, [](double) { return 0.0; }};
}

AngleTrace AngleTrace::sine(double offset, double amplitude, double freq,
                            double phase) {
  const double omega = 2.0 * std::numbers::pi * freq;
  return {[=](double t) { return offset + amplitude * std::sin(omega * t + phase); },
          [=](double t) { return amplitude * omega * std::cos(omega * t + phase); }};
}

AngleTrace AngleTrace::keyframes(std::vector<Keyframe> frames) {
  if (frames.empty()) fail_input("keyframe trace needs at least one keyframe");
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (!(frames[i].t > frames[i - 1].t)) {
      fail_input("keyframe times must increase");
    }
  }
  auto shared = std::make_shared<const std::vector<Keyframe>>(std::move(frames));

  // Segment k spans frames[k] .. frames[k+1]; npos outside the span.
  auto locate = [shared](double t) -> std::size_t {
    const auto& f = *shared;
    if (t <= f.front().t || t >= f.back().t) return f.size();
    const auto it = std::upper_bound(
        f.begin(), f.end(), t,
        [](double x, const Keyframe& k) { return x < k.t; });
    return static_cast<std::size_t>(it - f.begin()) - 1;
  };

  AngleTrace trace;
  trace.value = [shared, locate](double t) {
    const auto& f = *shared;
    const std::size_t k = locate(t);
    if (k == f.size()) return t <= f.front().t ? f.front().value : f.back().value;
    const double u = (t - f[k].t) / (f[k + 1].t - f[k].t);
    return f[k].value + (f[k + 1].value - f[k].value) * eased_cosine(u);
  };
  trace.rate = [shared, locate](double t) {
    const auto& f = *shared;
    const std::size_t k = locate(t);
    if (k == f.size()) return 0.0;
    const double span = f[k + 1].t - f[k].t;
    const double u = (t - f[k].t) / span;
    return (f[k + 1].value - f[k].value) * eased_cosine_slope(u) / span;
  };
  return trace;
}

AngleQuad SynthAngles::sample(double rate) const {
  const auto n = static_cast<std::size_t>(std::floor(duration * rate)) + 1;
  AngleQuad quad;
  for (std::size_t c = 0; c < 4; ++c) {
    UniformSeries& s = quad.series(series_of(c));
    s.t0 = 0.0;
    s.rate = rate;
    s.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      s.values[k] = traces[c].value(static_cast<double>(k) / rate);
    }
  }
  return quad;
}

}  // namespace gait
