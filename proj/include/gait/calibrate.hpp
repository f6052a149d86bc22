#pragma once

// Per-user calibration: bounded least squares for the static lengths,
// a nonlinear fit of constant event-angle biases, and recursive least
// squares for online calibration while walking with a constant step.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gait/core.hpp"

namespace gait {

struct ReferenceStep {
  std::size_t step_index = 0;
  double length_cm = 0.0;
  Side side = Side::Left;
};

/// Step length is linear in (l1, l2, d5): D = h . (l1, l2, d5).
struct FeatureVector {
  double h1 = 0.0;  ///< sin a_f - sin a_b
  double h2 = 0.0;  ///< sin(a_f - b_f) + sin(b_b - a_b)
  double h3 = 1.0;

  Eigen::Vector3d vector() const noexcept { return {h1, h2, h3}; }
  double dot(const StaticParams& p) const noexcept {
    return h1 * p.l1 + h2 * p.l2 + h3 * p.d5;
  }
};

FeatureVector feature_vector(const EventAngles& angles);

/// Constant offsets added to the observed event angles, degrees.
struct AngleBias {
  double alpha_f = 0.0;
  double beta_f = 0.0;
  double alpha_b = 0.0;
  double beta_b = 0.0;

  bool operator==(const AngleBias&) const = default;
};

EventAngles apply_bias(const EventAngles& observed, const AngleBias& bias);
void apply_bias(std::span<StepMeasurement> steps, const AngleBias& bias);

/// Half-width of the calibration box relative to the nominal value.
inline constexpr double kCalibrationBoxFraction = 0.10;

struct BoundedLsqResult {
  Eigen::VectorXd x;
  double sse = 0.0;
};

/// min ||A x - b||^2 subject to lo <= x <= hi, solved exactly by trying
/// every assignment of each variable to its lower face, upper face or the
/// interior (3^n reduced problems). Intended for n <= 6. `ridge` adds
/// ridge * ||x - anchor||^2, which keeps the reduced systems well posed.
BoundedLsqResult bounded_least_squares(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& lo,
                                       const Eigen::VectorXd& hi,
                                       double ridge = 0.0,
                                       const Eigen::VectorXd* anchor = nullptr);

struct CalibrationResult {
  StaticParams params;
  std::optional<AngleBias> bias;
  double sse_before = 0.0;  ///< cm^2, in-sample
  double sse_after = 0.0;   ///< cm^2, in-sample
  std::size_t iterations = 0;
  bool degenerate = false;
  std::vector<std::string> diagnostics;
};

inline constexpr std::size_t kMinBatchSteps = 3;

/// Pairs each step with the reference of the same index. Throws InvalidInput
/// for a missing reference or a side mismatch.
std::vector<ReferenceStep> match_references(
    std::span<const StepMeasurement> steps,
    std::span<const ReferenceStep> refs);

/// Box-constrained fit of (l1, l2, d5) within 10% of nominal. `refs[i]`
/// must belong to `steps[i]`. A rank-deficient feature matrix returns the
/// nominal lengths with `degenerate` set.
CalibrationResult batch_fit_params(std::span<const StepMeasurement> steps,
                                   std::span<const ReferenceStep> refs,
                                   const StaticParams& nominal);

/// Sum of squared reference errors, cm^2.
double sum_squared_error(std::span<const StepMeasurement> steps,
                         std::span<const ReferenceStep> refs,
                         const StaticParams& params,
                         const AngleBias& bias = {});

/// Per-event-type mean of the observed angles.
EventAngles mean_angles(std::span<const StepMeasurement> steps);

struct BiasFitResult {
  AngleBias bias;
  double sse_before = 0.0;
  double sse_after = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

inline constexpr double kBiasFitTolerance = 1e-6;  ///< cm^2 SSE change
inline constexpr std::size_t kBiasFitMaxIterations = 500;

/// Re-fits the four mean event angles, each within 10% of its nominal
/// magnitude, with the lengths held fixed; bias = fitted mean - observed
/// mean. Throws InvalidInput when an angle column is constant.
BiasFitResult batch_fit_biases(std::span<const StepMeasurement> steps,
                               std::span<const ReferenceStep> refs,
                               const StaticParams& params,
                               const EventAngles& nominal_angles);

inline constexpr double kDefaultRlsLambda = 0.98;
inline constexpr double kDefaultRlsP0 = 1000.0;

struct RlsState {
  Eigen::Vector3d w = Eigen::Vector3d::Zero();  ///< (l1, l2, d5), cm
  Eigen::Matrix3d p = Eigen::Matrix3d::Identity();
  double lambda = kDefaultRlsLambda;
  std::size_t updates = 0;

  StaticParams params() const noexcept { return {w[0], w[1], w[2]}; }
};

/// Throws InvalidInput unless p0_scale > 0 and lambda in (0.9, 1].
RlsState rls_init(const StaticParams& nominal, double p0_scale = kDefaultRlsP0,
                  double lambda = kDefaultRlsLambda);
RlsState rls_update(const RlsState& state, const FeatureVector& h,
                    double d_ref);

/// Number of leading steps (in time order) used for training; the rest
/// are held out.
std::size_t training_count(std::size_t n, double fraction = 0.7) noexcept;

}  // namespace gait
