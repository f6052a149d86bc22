#include <algorithm>
#include <cmath>
#include <sstream>

#include "gait/calibrate.hpp"
#include "gait/error.hpp"

namespace gait {

FeatureVector feature_vector(const EventAngles& g) {
  const double af = deg_to_rad(g.alpha_f);
  const double bf = deg_to_rad(g.beta_f);
  const double ab = deg_to_rad(g.alpha_b);
  const double bb = deg_to_rad(g.beta_b);
  return {std::sin(af) - std::sin(ab), std::sin(af - bf) + std::sin(bb - ab),
          1.0};
}

EventAngles apply_bias(const EventAngles& o, const AngleBias& b) {
  return {o.alpha_f + b.alpha_f, o.beta_f + b.beta_f, o.alpha_b + b.alpha_b,
          o.beta_b + b.beta_b};
}

void apply_bias(std::span<StepMeasurement> steps, const AngleBias& bias) {
  for (StepMeasurement& s : steps) s.angles = apply_bias(s.angles, bias);
}

std::size_t training_count(std::size_t n, double fraction) noexcept {
  return static_cast<std::size_t>(
      std::floor(static_cast<double>(n) * fraction + 1e-9));
}

std::vector<ReferenceStep> match_references(
    std::span<const StepMeasurement> steps,
    std::span<const ReferenceStep> refs) {
  std::vector<ReferenceStep> out;
  out.reserve(steps.size());
  for (const StepMeasurement& s : steps) {
    const auto it = std::find_if(refs.begin(), refs.end(), [&](const auto& r) {
      return r.step_index == s.index;
    });
    if (it == refs.end()) {
      fail_input("no reference length for step " + std::to_string(s.index));
    }
    if (it->side != s.front_side) {
      fail_input("reference side mismatch at step " + std::to_string(s.index));
    }
    out.push_back(*it);
  }
  return out;
}

namespace {

void check_pairs(std::span<const StepMeasurement> steps,
                 std::span<const ReferenceStep> refs) {
  if (steps.size() != refs.size()) {
    fail_input("mismatched step/reference counts: " +
               std::to_string(steps.size()) + " steps, " +
               std::to_string(refs.size()) + " references");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].index != refs[i].step_index) {
      fail_input("reference " + std::to_string(i) + " is for step " +
                 std::to_string(refs[i].step_index) + ", expected step " +
                 std::to_string(steps[i].index));
    }
    if (!(refs[i].length_cm > 0.0) || !std::isfinite(refs[i].length_cm)) {
      fail_input("reference length for step " +
                 std::to_string(refs[i].step_index) + " must be positive");
    }
  }
}

}  // namespace

double sum_squared_error(std::span<const StepMeasurement> steps,
                         std::span<const ReferenceStep> refs,
                         const StaticParams& params, const AngleBias& bias) {
  check_pairs(steps, refs);
  double sse = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double d = step_length(params, apply_bias(steps[i].angles, bias)).total;
    const double e = refs[i].length_cm - d;
    sse += e * e;
  }
  return sse;
}

CalibrationResult batch_fit_params(std::span<const StepMeasurement> steps,
                                   std::span<const ReferenceStep> refs,
                                   const StaticParams& nominal) {
  validate(nominal);
  check_pairs(steps, refs);
  if (steps.size() < kMinBatchSteps) {
    fail_input("batch fit needs at least " + std::to_string(kMinBatchSteps) +
               " referenced steps, got " + std::to_string(steps.size()));
  }

  const auto n = static_cast<Eigen::Index>(steps.size());
  Eigen::MatrixXd h(n, 3);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h.row(i) = feature_vector(steps[i].angles).vector().transpose();
    d[i] = refs[i].length_cm;
  }

  CalibrationResult out;
  out.params = nominal;
  const Eigen::Vector3d w0{nominal.l1, nominal.l2, nominal.d5};
  out.sse_before = (h * w0 - d).squaredNorm();
  out.sse_after = out.sse_before;

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  const auto& sv = svd.singularValues();
  if (sv[0] == 0.0 || sv[2] / sv[0] < 1e-9) {
    std::ostringstream msg;
    msg << "feature matrix is rank deficient (singular values " << sv[0]
        << ", " << sv[1] << ", " << sv[2]
        << "); keeping nominal lengths. Steps need varied joint angles.";
    out.degenerate = true;
    out.diagnostics.push_back(msg.str());
    return out;
  }

  const Eigen::Vector3d lo = (1.0 - kCalibrationBoxFraction) * w0;
  const Eigen::Vector3d hi = (1.0 + kCalibrationBoxFraction) * w0;
  const BoundedLsqResult fit = bounded_least_squares(h, d, lo, hi);
  out.iterations = 1;
  // Nominal is feasible, so the global minimum can never be worse.
  if (fit.sse <= out.sse_before) {
    out.params = {fit.x[0], fit.x[1], fit.x[2]};
    out.sse_after = fit.sse;
  }
  if (auto w = plausibility_warning(out.params)) out.diagnostics.push_back(*w);
  return out;
}

EventAngles mean_angles(std::span<const StepMeasurement> steps) {
  if (steps.empty()) fail_input("mean angles of an empty step list");
  EventAngles m;
  for (const StepMeasurement& s : steps) {
    m.alpha_f += s.angles.alpha_f;
    m.beta_f += s.angles.beta_f;
    m.alpha_b += s.angles.alpha_b;
    m.beta_b += s.angles.beta_b;
  }
  const double k = static_cast<double>(steps.size());
  return {m.alpha_f / k, m.beta_f / k, m.alpha_b / k, m.beta_b / k};
}

}  // namespace gait
