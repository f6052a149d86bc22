#include <cmath>
#include <map>
#include <utility>

#include "gait/error.hpp"
#include "gait/io.hpp"

namespace gait {

ErrorStats error_stats(const std::vector<double>& estimate,
                       const std::vector<double>& reference) {
  if (estimate.size() != reference.size()) {
    fail_invariant("error_stats: estimate and reference sizes differ");
  }
  ErrorStats s;
  s.n = estimate.size();
  if (s.n == 0) return s;
  double ape = 0.0;
  double se = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    const double e = estimate[i] - reference[i];
    ape += std::abs(e) / reference[i];
    se += e * e;
  }
  s.mape_pct = 100.0 * ape / static_cast<double>(s.n);
  s.rmse = std::sqrt(se / static_cast<double>(s.n));
  return s;
}

Metrics compute_metrics(const std::vector<StepMeasurement>& steps,
                        const std::vector<Stride>& strides,
                        const std::vector<ReferenceStep>& refs) {
  std::map<std::pair<std::size_t, Side>, double> by_key;
  for (const ReferenceStep& r : refs) by_key[{r.step_index, r.side}] = r.length_cm;
  auto lookup = [&](const StepMeasurement& s) -> std::optional<double> {
    auto it = by_key.find({s.index, s.front_side});
    if (it == by_key.end()) return std::nullopt;
    return it->second;
  };

  Metrics m;
  std::vector<double> est;
  std::vector<double> ref;
  for (const StepMeasurement& s : steps) {
    if (auto r = lookup(s)) {
      est.push_back(s.length);
      ref.push_back(*r);
    } else {
      ++m.unmatched_steps;
    }
  }
  m.step = error_stats(est, ref);
  for (std::size_t i = 0; i < est.size(); ++i) {
    m.total_estimated_cm += est[i];
    m.total_reference_cm += ref[i];
  }
  if (m.total_reference_cm > 0.0) {
    m.total_distance_pct = 100.0 *
                           std::abs(m.total_estimated_cm - m.total_reference_cm) /
                           m.total_reference_cm;
  }

  // Reference strides and velocities use the same pairing, stride times and
  // trailing five-stride windows as the estimates.
  std::vector<std::optional<double>> ref_stride(strides.size());
  est.clear();
  ref.clear();
  for (std::size_t i = 0; i < strides.size(); ++i) {
    const auto a = lookup(strides[i].step_a);
    const auto b = lookup(strides[i].step_b);
    if (a && b) {
      ref_stride[i] = *a + *b;
      est.push_back(strides[i].length);
      ref.push_back(*ref_stride[i]);
    }
  }
  m.stride = error_stats(est, ref);

  est.clear();
  ref.clear();
  for (std::size_t i = 0; i < strides.size(); ++i) {
    const std::size_t first = i + 1 - strides[i].velocity_window;
    double length_cm = 0.0;
    double time_s = 0.0;
    bool complete = true;
    for (std::size_t k = first; k <= i; ++k) {
      if (!ref_stride[k]) {
        complete = false;
        break;
      }
      length_cm += *ref_stride[k];
      time_s += strides[k].stride_time;
    }
    if (!complete || !(time_s > 0.0)) continue;
    est.push_back(strides[i].velocity);
    ref.push_back(length_cm / 100.0 / time_s);
  }
  m.velocity = error_stats(est, ref);
  return m;
}

}  // namespace gait
