#pragma once

// Test-side oracles and fixtures. Nothing here calls into the code under
// test for the quantity being checked.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "gait/core.hpp"

namespace oracle {

inline double rad(double deg) { return deg * std::numbers::pi / 180.0; }

/// Heel-to-heel distance from planar leg geometry. Each leg is a chain of
/// two links hanging from the hip; a link at angle phi from the downward
/// vertical (positive forward) is len * exp(i phi), real part down and
/// imaginary part forward. The thigh diameter is added once.
inline double heel_distance(double l1, double l2, double d5, double alpha_f,
                            double beta_f, double alpha_b, double beta_b) {
  auto chain = [&](double hip, double knee) {
    const std::complex<double> thigh = std::polar(l1, rad(hip));
    // The shank folds back from the thigh direction by the knee flexion.
    const std::complex<double> shank = std::polar(l2, rad(hip)) *
                                       std::polar(1.0, -rad(knee));
    return (thigh + shank).imag();
  };
  return chain(alpha_f, beta_f) - chain(alpha_b, beta_b) + d5;
}

/// Unconstrained least squares for three unknowns via normal equations
/// solved by Cramer's rule.
inline std::array<double, 3> lsq3(const std::vector<std::array<double, 3>>& h,
                                  const std::vector<double>& d) {
  double a[3][3] = {};
  double b[3] = {};
  for (std::size_t k = 0; k < h.size(); ++k) {
    for (int i = 0; i < 3; ++i) {
      b[i] += h[k][i] * d[k];
      for (int j = 0; j < 3; ++j) a[i][j] += h[k][i] * h[k][j];
    }
  }
  auto det = [](const double m[3][3]) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double d0 = det(a);
  std::array<double, 3> x{};
  for (int c = 0; c < 3; ++c) {
    double m[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) m[i][j] = j == c ? b[i] : a[i][j];
    }
    x[c] = det(m) / d0;
  }
  return x;
}

}  // namespace oracle

namespace fixture {

/// Alternating steps starting with Left, one every `dt` seconds, with the
/// back-limb event 40% of the way to the next contact.
inline std::vector<gait::StepMeasurement> steps(const std::vector<double>& lengths,
                                                double dt = 0.55,
                                                double t0 = 2.0) {
  std::vector<gait::StepMeasurement> out;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    gait::StepMeasurement s;
    s.index = i;
    s.front_side = i % 2 == 0 ? gait::Side::Left : gait::Side::Right;
    s.t_front_event = t0 + dt * static_cast<double>(i);
    s.t_back_event = s.t_front_event + 0.4 * dt;
    s.length = lengths[i];
    out.push_back(s);
  }
  return out;
}

/// Strides from per-stride (left, right) step lengths.
inline std::vector<gait::Stride> strides(
    const std::vector<std::pair<double, double>>& lr, double dt = 0.55) {
  std::vector<double> lengths;
  for (auto [l, r] : lr) {
    lengths.push_back(l);
    lengths.push_back(r);
  }
  const auto s = steps(lengths, dt);
  return gait::stride_metrics(s);
}

}  // namespace fixture
