#include <cassert>

#include "gait/kernels.hpp"

namespace gait::kernels::scalar {

void window_mean(std::span<const double> in, std::size_t m,
                 std::span<double> out) {
  assert(out.size() == window_mean_count(in.size(), m));
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = window_mean_one(in.data() + m * j, m);
  }
}

void five_point_interior(std::span<const double> in, double h,
                         std::span<double> out) {
  assert(out.size() == in.size());
  const std::size_t n = in.size();
  for (std::size_t k = 2; k + 2 < n; ++k) {
    out[k] = five_point_one(in[k - 2], in[k - 1], in[k + 1], in[k + 2], h);
  }
}

}  // namespace gait::kernels::scalar
