#include <algorithm>
#include <string>

#include "gait/core.hpp"
#include "gait/error.hpp"

namespace gait {

double Stride::left_length() const noexcept {
  return step_a.front_side == Side::Left ? step_a.length : step_b.length;
}

double Stride::right_length() const noexcept {
  return step_a.front_side == Side::Right ? step_a.length : step_b.length;
}

Stride make_stride(std::size_t index, const StepMeasurement& a,
                   const StepMeasurement& b, const StepMeasurement* next) {
  if (a.front_side == b.front_side) {
    fail_invariant("segmentation inconsistency: steps " +
                   std::to_string(a.index) + " and " +
                   std::to_string(b.index) + " share front side " +
                   std::string(to_string(a.front_side)));
  }
  Stride s;
  s.index = index;
  s.step_a = a;
  s.step_b = b;
  s.length = a.length + b.length;

  // Tracked leg: front in step a (initial contact at a.t_front_event), back
  // in step b (foot-off at b.t_back_event).
  s.stance_time = b.t_back_event - a.t_front_event;
  if (next != nullptr) {
    s.stride_time = next->t_front_event - a.t_front_event;
  } else {
    s.stride_time = 2.0 * (b.t_front_event - a.t_front_event);
    s.time_extrapolated = true;
  }
  s.swing_time = s.stride_time - s.stance_time;
  if (!(s.stride_time > 0.0)) {
    fail_invariant("non-positive stride time at stride " +
                   std::to_string(index));
  }
  return s;
}

void assign_velocity(std::span<Stride> strides, std::size_t i) {
  const std::size_t first =
      i + 1 >= kVelocityWindowStrides ? i + 1 - kVelocityWindowStrides : 0;
  double length_cm = 0.0;
  double time_s = 0.0;
  for (std::size_t k = first; k <= i; ++k) {
    length_cm += strides[k].length;
    time_s += strides[k].stride_time;
  }
  Stride& s = strides[i];
  s.velocity_window = i - first + 1;
  s.velocity_partial = s.velocity_window < kVelocityWindowStrides;
  s.velocity = (length_cm / 100.0) / time_s;
}

std::vector<Stride> stride_metrics(std::span<const StepMeasurement> steps) {
  if (steps.size() < 2) {
    fail_input("stride metrics need at least two steps, got " +
               std::to_string(steps.size()));
  }
  for (std::size_t i = 1; i < steps.size(); ++i) {
    if (steps[i].front_side == steps[i - 1].front_side) {
      fail_invariant("segmentation inconsistency: steps " +
                     std::to_string(steps[i - 1].index) + " and " +
                     std::to_string(steps[i].index) +
                     " do not alternate front side");
    }
  }
  std::vector<Stride> strides;
  strides.reserve(steps.size() / 2);
  for (std::size_t i = 0; i + 1 < steps.size(); i += 2) {
    const StepMeasurement* next = i + 2 < steps.size() ? &steps[i + 2] : nullptr;
    strides.push_back(make_stride(strides.size(), steps[i], steps[i + 1], next));
    assign_velocity(strides, strides.size() - 1);
  }
  return strides;
}

}  // namespace gait
