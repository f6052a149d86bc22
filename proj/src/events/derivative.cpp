#include <cmath>

#include "gait/error.hpp"
#include "gait/events.hpp"
#include "gait/kernels.hpp"

namespace gait {

std::string to_string(SeriesId id) {
  return std::string(id.joint == Joint::Knee ? "knee_" : "hip_") +
         std::string(to_string(id.side));
}

void AngleQuad::validate() const {
  const UniformSeries& ref = knee[0];
  for (std::size_t c = 0; c < 4; ++c) {
    const UniformSeries& s = series(series_of(c));
    if (s.rate != ref.rate || s.size() != ref.size() ||
        std::abs(s.t0 - ref.t0) > 1e-9) {
      fail_input("angle series " + to_string(series_of(c)) +
                 " is not aligned with knee_L");
    }
  }
  if (!(ref.rate > 0.0)) fail_input("angle series rate must be positive");
}

DerivativeSeries five_point_derivative(const UniformSeries& s) {
  const std::size_t n = s.size();
  if (n < 5) {
    fail_input("five-point derivative needs at least 5 samples, got " +
               std::to_string(n));
  }
  const double h = 1.0 / s.rate;
  DerivativeSeries out;
  out.values.t0 = s.t0;
  out.values.rate = s.rate;
  out.values.values.assign(n, 0.0);
  kernels::five_point_interior(s.values, h, out.values.values);

  const auto& v = s.values;
  auto& d = out.values.values;
  d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
  d[1] = (v[2] - v[0]) / (2.0 * h);
  d[n - 2] = (v[n - 1] - v[n - 3]) / (2.0 * h);
  d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
  return out;
}

}  // namespace gait
