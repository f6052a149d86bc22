#include <atomic>
#include <cstdlib>
#include <cstring>

#include "gait/kernels.hpp"

namespace gait::kernels {

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::Avx2 ? "avx2" : "scalar";
}

Isa detect_isa() noexcept {
  return avx2::available() ? Isa::Avx2 : Isa::Scalar;
}

namespace {

Isa initial_isa() noexcept {
  // GAITKIT_ISA=scalar pins the reference kernels.
  if (const char* env = std::getenv("GAITKIT_ISA");
      env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::Scalar;
  }
  return detect_isa();
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) noexcept {
  if (isa == Isa::Avx2 && !avx2::available()) isa = Isa::Scalar;
  current().store(isa, std::memory_order_relaxed);
}

void window_mean(std::span<const double> in, std::size_t m,
                 std::span<double> out) {
  if (active_isa() == Isa::Avx2) {
    avx2::window_mean(in, m, out);
  } else {
    scalar::window_mean(in, m, out);
  }
}

void five_point_interior(std::span<const double> in, double h,
                         std::span<double> out) {
  if (active_isa() == Isa::Avx2) {
    avx2::five_point_interior(in, h, out);
  } else {
    scalar::five_point_interior(in, h, out);
  }
}

}  // namespace gait::kernels
