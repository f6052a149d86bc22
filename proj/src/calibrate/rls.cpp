#include <cmath>

#include "gait/calibrate.hpp"
#include "gait/error.hpp"

namespace gait {

RlsState rls_init(const StaticParams& nominal, double p0_scale,
                  double lambda) {
  validate(nominal);
  if (!(p0_scale > 0.0) || !std::isfinite(p0_scale)) {
    fail_input("rls_p0 must be positive");
  }
  if (!(lambda > 0.9 && lambda <= 1.0)) {
    fail_input("rls_lambda must lie in (0.9, 1], got " +
               std::to_string(lambda));
  }
  RlsState s;
  s.w = {nominal.l1, nominal.l2, nominal.d5};
  s.p = p0_scale * Eigen::Matrix3d::Identity();
  s.lambda = lambda;
  return s;
}

RlsState rls_update(const RlsState& state, const FeatureVector& f,
                    double d_ref) {
  const Eigen::Vector3d h = f.vector();
  if (!h.allFinite() || !std::isfinite(d_ref)) {
    fail_input("rls update with non-finite features or reference");
  }
  const Eigen::Vector3d ph = state.p * h;
  const double denom = state.lambda + h.dot(ph);
  const Eigen::Vector3d k = ph / denom;

  RlsState next = state;
  next.w = state.w + k * (d_ref - h.dot(state.w));
  const Eigen::Matrix3d p = (state.p - k * ph.transpose()) / state.lambda;
  next.p = 0.5 * (p + p.transpose());
  ++next.updates;
  if (!next.w.allFinite() || !next.p.allFinite()) {
    fail_invariant("rls state became non-finite");
  }
  return next;
}

}  // namespace gait
