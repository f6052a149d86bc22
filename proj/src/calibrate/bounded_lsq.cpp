#include <cmath>
#include <limits>

#include "gait/calibrate.hpp"
#include "gait/error.hpp"

namespace gait {

namespace {

enum class Face { Lower, Upper, Free };

bool inside(double v, double lo, double hi) noexcept {
  const double tol = 1e-10 * (1.0 + std::max(std::abs(lo), std::abs(hi)));
  return v >= lo - tol && v <= hi + tol;
}

}  // namespace

BoundedLsqResult bounded_least_squares(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b,
                                       const Eigen::VectorXd& lo,
                                       const Eigen::VectorXd& hi,
                                       double ridge,
                                       const Eigen::VectorXd* anchor) {
  const Eigen::Index n = a.cols();
  if (n == 0 || n > 8 || a.rows() != b.size() || lo.size() != n ||
      hi.size() != n) {
    fail_input("bounded least squares: inconsistent problem dimensions");
  }
  if ((lo.array() > hi.array()).any()) {
    fail_input("bounded least squares: lower bound above upper bound");
  }

  // Ridge term folded in as extra rows.
  Eigen::MatrixXd m = a;
  Eigen::VectorXd rhs = b;
  if (ridge > 0.0) {
    const Eigen::VectorXd centre =
        anchor != nullptr ? *anchor : Eigen::VectorXd::Zero(n);
    m.conservativeResize(a.rows() + n, n);
    rhs.conservativeResize(a.rows() + n);
    const double s = std::sqrt(ridge);
    m.bottomRows(n) = s * Eigen::MatrixXd::Identity(n, n);
    rhs.tail(n) = s * centre;
  }

  std::size_t combos = 1;
  for (Eigen::Index i = 0; i < n; ++i) combos *= 3;

  BoundedLsqResult best;
  double best_obj = std::numeric_limits<double>::infinity();
  std::vector<Face> faces(static_cast<std::size_t>(n));
  for (std::size_t code = 0; code < combos; ++code) {
    std::size_t c = code;
    std::vector<Eigen::Index> free;
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      faces[i] = static_cast<Face>(c % 3);
      c /= 3;
      if (faces[i] == Face::Lower) x[i] = lo[i];
      else if (faces[i] == Face::Upper) x[i] = hi[i];
      else free.push_back(i);
    }
    // A free variable with a zero-width box is already covered by a face.
    bool skip = false;
    for (Eigen::Index i : free) skip = skip || lo[i] == hi[i];
    if (skip) continue;

    if (!free.empty()) {
      const auto nf = static_cast<Eigen::Index>(free.size());
      Eigen::MatrixXd af(m.rows(), nf);
      Eigen::VectorXd r = rhs;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (faces[i] != Face::Free) r -= m.col(i) * x[i];
      }
      for (Eigen::Index k = 0; k < nf; ++k) af.col(k) = m.col(free[k]);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(af);
      if (qr.rank() < nf) continue;
      const Eigen::VectorXd xf = qr.solve(r);
      bool feasible = true;
      for (Eigen::Index k = 0; k < nf; ++k) {
        const Eigen::Index i = free[k];
        if (!inside(xf[k], lo[i], hi[i])) {
          feasible = false;
          break;
        }
        x[i] = std::clamp(xf[k], lo[i], hi[i]);
      }
      if (!feasible) continue;
    }
    const double obj = (m * x - rhs).squaredNorm();
    if (obj < best_obj) {
      best_obj = obj;
      best.x = x;
    }
  }
  best.sse = (a * best.x - b).squaredNorm();
  return best;
}

}  // namespace gait
