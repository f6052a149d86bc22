#include <cmath>
#include <sstream>

#include "gait/error.hpp"
#include "gait/synth.hpp"

namespace gait {

namespace {

EventAngles tied(const KinematicShape& shape, double alpha_f) {
  return {alpha_f, shape.beta_f, shape.alpha_b_ratio * alpha_f, shape.beta_b};
}

EventAngles scaled_knees(const KinematicShape& shape, double s) {
  return {0.0, s * shape.beta_f, 0.0, s * shape.beta_b};
}

template <typename F>
double bisect(F&& length_at, double target, double lo, double hi) {
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (length_at(mid) < target) lo = mid;
    else hi = mid;
  }
  return std::abs(length_at(lo) - target) <= std::abs(length_at(hi) - target)
             ? lo
             : hi;
}

}  // namespace

EventAngles solve_event_angles(const StaticParams& params, double target,
                               const KinematicShape& shape) {
  validate(params);
  if (!std::isfinite(target)) fail_input("target step length is not finite");
  auto length = [&](const EventAngles& g) { return step_length(params, g).total; };

  const double at_zero = length(tied(shape, 0.0));
  const double at_max = length(tied(shape, shape.max_alpha_f));
  if (target > at_max) {
    std::ostringstream msg;
    msg << "target step length " << target << " cm is infeasible: alpha_f "
        << "would exceed " << shape.max_alpha_f << " deg (longest step "
        << at_max << " cm)";
    fail_input(msg.str());
  }
  if (target >= at_zero) {
    const double a = bisect(
        [&](double x) { return length(tied(shape, x)); }, target, 0.0,
        shape.max_alpha_f);
    return tied(shape, a);
  }

  // Shorter than the alpha_f = 0 step: bring both knees towards straight.
  const double standing = length(scaled_knees(shape, 0.0));
  if (target < standing - 1e-12) {
    std::ostringstream msg;
    msg << "target step length " << target << " cm is infeasible: beta_b "
        << "would have to drop below 0 deg (shortest step " << standing
        << " cm)";
    fail_input(msg.str());
  }
  if (shape.beta_b <= shape.beta_f) {
    fail_input("short steps need beta_b above beta_f in the kinematic shape");
  }
  const double s = bisect(
      [&](double x) { return length(scaled_knees(shape, x)); }, target, 0.0,
      1.0);
  return scaled_knees(shape, s);
}

}  // namespace gait
