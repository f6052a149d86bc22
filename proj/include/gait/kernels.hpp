#pragma once

// Data-parallel inner loops of the signal path. Each kernel has a scalar
// reference and an AVX2 variant; the AVX2 lanes run over output samples and
// keep the scalar summation order, so both variants are bit-identical.

#include <cstddef>
#include <span>
#include <string_view>

namespace gait::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa) noexcept;

/// Best ISA supported by this CPU (and this build).
Isa detect_isa() noexcept;
/// ISA currently used by the dispatching entry points.
Isa active_isa() noexcept;
/// Forces an ISA; requests the CPU cannot run fall back to Scalar.
void set_isa(Isa isa) noexcept;

/// RAII override used by tests and benchmarks.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa) noexcept : saved_(active_isa()) { set_isa(isa); }
  ~ScopedIsa() { set_isa(saved_); }
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa saved_;
};

/// Number of complete centered windows: floor(n / m) - 1 (0 if n < 2m).
constexpr std::size_t window_mean_count(std::size_t n, std::size_t m) noexcept {
  return (m == 0 || n < 2 * m) ? 0 : n / m - 1;
}

/// out[j] = (in[m*j] + ... + in[m*j + 2m - 1]) / (2m), summed left to right.
/// out.size() must equal window_mean_count(in.size(), m).
void window_mean(std::span<const double> in, std::size_t m,
                 std::span<double> out);

/// Central five-point stencil, written for k in [2, n-3]:
/// out[k] = (in[k-2] - 8 in[k-1] + 8 in[k+1] - in[k+2]) / (12 h).
/// Other entries of `out` are left untouched. out.size() == in.size().
void five_point_interior(std::span<const double> in, double h,
                         std::span<double> out);

/// Single-output forms shared with the streaming path; same arithmetic.
inline double window_mean_one(const double* first, std::size_t m) noexcept {
  double sum = 0.0;
  for (std::size_t i = 0; i < 2 * m; ++i) sum += first[i];
  return sum / static_cast<double>(2 * m);
}

inline double five_point_one(double s_m2, double s_m1, double s_p1,
                             double s_p2, double h) noexcept {
  return (((s_m2 - 8.0 * s_m1) + 8.0 * s_p1) - s_p2) / (12.0 * h);
}

namespace scalar {
void window_mean(std::span<const double> in, std::size_t m,
                 std::span<double> out);
void five_point_interior(std::span<const double> in, double h,
                         std::span<double> out);
}  // namespace scalar

namespace avx2 {
bool available() noexcept;
void window_mean(std::span<const double> in, std::size_t m,
                 std::span<double> out);
void five_point_interior(std::span<const double> in, double h,
                         std::span<double> out);
}  // namespace avx2

}  // namespace gait::kernels
