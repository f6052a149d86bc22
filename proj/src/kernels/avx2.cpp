// Compiled with -mavx2. Only the functions declared in kernels.hpp leave
// this translation unit.

#include <immintrin.h>

#include <cassert>

#include "gait/kernels.hpp"

namespace gait::kernels::avx2 {

bool available() noexcept {
#if defined(__GNUC__) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

void window_mean(std::span<const double> in, std::size_t m,
                 std::span<double> out) {
  assert(out.size() == window_mean_count(in.size(), m));
  const std::size_t count = out.size();
  const auto stride = static_cast<long long>(m);
  const __m256i lanes = _mm256_set_epi64x(3 * stride, 2 * stride, stride, 0);
  const __m256d width = _mm256_set1_pd(static_cast<double>(2 * m));

  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const double* base = in.data() + m * j;
    __m256d sum = _mm256_setzero_pd();
    for (std::size_t i = 0; i < 2 * m; ++i) {
      sum = _mm256_add_pd(sum, _mm256_i64gather_pd(base + i, lanes, 8));
    }
    _mm256_storeu_pd(out.data() + j, _mm256_div_pd(sum, width));
  }
  for (; j < count; ++j) out[j] = window_mean_one(in.data() + m * j, m);
}

void five_point_interior(std::span<const double> in, double h,
                         std::span<double> out) {
  assert(out.size() == in.size());
  const std::size_t n = in.size();
  if (n < 5) return;
  const __m256d eight = _mm256_set1_pd(8.0);
  const __m256d denom = _mm256_set1_pd(12.0 * h);
  const double* s = in.data();

  std::size_t k = 2;
  for (; k + 4 + 2 <= n; k += 4) {
    const __m256d m2 = _mm256_loadu_pd(s + k - 2);
    const __m256d m1 = _mm256_loadu_pd(s + k - 1);
    const __m256d p1 = _mm256_loadu_pd(s + k + 1);
    const __m256d p2 = _mm256_loadu_pd(s + k + 2);
    __m256d acc = _mm256_sub_pd(m2, _mm256_mul_pd(eight, m1));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(eight, p1));
    acc = _mm256_sub_pd(acc, p2);
    _mm256_storeu_pd(out.data() + k, _mm256_div_pd(acc, denom));
  }
  for (; k + 2 < n; ++k) {
    out[k] = five_point_one(s[k - 2], s[k - 1], s[k + 1], s[k + 2], h);
  }
}

}  // namespace gait::kernels::avx2
