#include <algorithm>
#include <array>
#include <cmath>

#include "gait/calibrate.hpp"
#include "gait/error.hpp"

namespace gait {

namespace {

using Vec4 = Eigen::Vector4d;

constexpr std::array<const char*, 4> kAngleNames = {"alpha_f", "beta_f",
                                                    "alpha_b", "beta_b"};

Vec4 as_vec(const EventAngles& g) {
  return {g.alpha_f, g.beta_f, g.alpha_b, g.beta_b};
}
AngleBias as_bias(const Vec4& b) { return {b[0], b[1], b[2], b[3]}; }

// d D / d(angle), per degree.
Vec4 length_gradient(const StaticParams& p, const EventAngles& g) {
  const double af = deg_to_rad(g.alpha_f);
  const double bf = deg_to_rad(g.beta_f);
  const double ab = deg_to_rad(g.alpha_b);
  const double bb = deg_to_rad(g.beta_b);
  const double cf = std::cos(af - bf);
  const double cb = std::cos(bb - ab);
  const Vec4 rad{p.l2 * cf + p.l1 * std::cos(af), -p.l2 * cf,
                 -p.l1 * std::cos(ab) - p.l2 * cb, p.l2 * cb};
  return rad * deg_to_rad(1.0);
}

}  // namespace

BiasFitResult batch_fit_biases(std::span<const StepMeasurement> steps,
                               std::span<const ReferenceStep> refs,
                               const StaticParams& params,
                               const EventAngles& nominal_angles) {
  validate(params);
  if (steps.size() != refs.size()) {
    fail_input("mismatched step/reference counts: " +
               std::to_string(steps.size()) + " steps, " +
               std::to_string(refs.size()) + " references");
  }
  if (steps.size() < kMinBatchSteps) {
    fail_input("bias fit needs at least " + std::to_string(kMinBatchSteps) +
               " referenced steps");
  }
  for (std::size_t a = 0; a < 4; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const StepMeasurement& s : steps) {
      const double v = as_vec(s.angles)[static_cast<Eigen::Index>(a)];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo < 1e-9) {
      fail_input(std::string("bias fit: ") + kAngleNames[a] +
                 " is constant across all steps");
    }
  }

  const Vec4 observed = as_vec(mean_angles(steps));
  const Vec4 nominal = as_vec(nominal_angles);
  const Vec4 half = kCalibrationBoxFraction * nominal.cwiseAbs();
  const Vec4 lo = nominal - half - observed;
  const Vec4 hi = nominal + half - observed;

  const auto n = static_cast<Eigen::Index>(steps.size());
  auto sse_at = [&](const Vec4& b) {
    return sum_squared_error(steps, refs, params, as_bias(b));
  };

  BiasFitResult out;
  Vec4 b = Vec4::Zero().cwiseMax(lo).cwiseMin(hi);
  out.sse_before = sse_at(Vec4::Zero());
  double sse = sse_at(b);

  Eigen::MatrixXd jac(n, 4);
  Eigen::VectorXd rhs(n);
  while (out.iterations < kBiasFitMaxIterations) {
    ++out.iterations;
    const AngleBias bias = as_bias(b);
    for (Eigen::Index i = 0; i < n; ++i) {
      const EventAngles g = apply_bias(steps[i].angles, bias);
      const Vec4 grad = length_gradient(params, g);
      jac.row(i) = grad.transpose();
      // Linearized residual in terms of the new point y:
      // d - D(b) - J (y - b)  ->  target for J y is d - D(b) + J b.
      rhs[i] = refs[i].length_cm - step_length(params, g).total + grad.dot(b);
    }
    const double ridge =
        1e-10 * std::max(1.0, jac.squaredNorm() / 4.0);
    const Eigen::VectorXd anchor = b;
    const BoundedLsqResult sub =
        bounded_least_squares(jac, rhs, lo, hi, ridge, &anchor);
    const Vec4 dir = sub.x - b;

    // Backtrack along the segment; the box is convex, so every point on it
    // is feasible.
    double t = 1.0;
    Vec4 trial = b + dir;
    double trial_sse = sse_at(trial);
    while (trial_sse > sse && t > 1e-6) {
      t *= 0.5;
      trial = b + t * dir;
      trial_sse = sse_at(trial);
    }
    if (trial_sse > sse) {
      out.converged = true;
      break;
    }
    const double gain = sse - trial_sse;
    b = trial.cwiseMax(lo).cwiseMin(hi);
    sse = trial_sse;
    if (gain < kBiasFitTolerance) {
      out.converged = true;
      break;
    }
  }

  out.bias = as_bias(b);
  out.sse_after = sse;
  if (out.sse_after > out.sse_before) {
    // Only possible when the box excludes zero bias; keep the projection.
    out.sse_after = sse_at(b);
  }
  return out;
}

}  // namespace gait
