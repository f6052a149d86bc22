#include "gait/core.hpp"

#include <cctype>
#include <cmath>

#include "gait/error.hpp"

namespace gait {

std::string_view to_string(Side s) noexcept {
  return s == Side::Left ? "L" : "R";
}

Side parse_side(std::string_view text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "l" || lower == "left") return Side::Left;
  if (lower == "r" || lower == "right") return Side::Right;
  fail_input("unknown side '" + std::string(text) + "'");
}

void validate(const StaticParams& p) {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!ok(p.l1) || !ok(p.l2) || !ok(p.d5)) {
    fail_input("static parameters must be finite and positive (l1=" +
               std::to_string(p.l1) + ", l2=" + std::to_string(p.l2) +
               ", d5=" + std::to_string(p.d5) + ")");
  }
}

std::optional<std::string> plausibility_warning(const StaticParams& p) {
  if (p.l1 < p.l2 + 30.0) return std::nullopt;
  return "implausible segment lengths: l1=" + std::to_string(p.l1) +
         " cm is not shorter than l2 + 30 cm";
}

namespace {

void check_angle(double deg, const char* name) {
  if (!std::isfinite(deg)) fail_input(std::string(name) + " is not finite");
  if (std::abs(deg) > 180.0) {
    fail_input(std::string(name) + " = " + std::to_string(deg) +
               " deg is outside [-180, 180]");
  }
}

}  // namespace

StepLengthBreakdown step_length(const StaticParams& params,
                                const EventAngles& a) {
  validate(params);
  check_angle(a.alpha_f, "alpha_f");
  check_angle(a.beta_f, "beta_f");
  check_angle(a.alpha_b, "alpha_b");
  check_angle(a.beta_b, "beta_b");

  StepLengthBreakdown out;
  out.d1 = params.l2 * std::sin(deg_to_rad(a.alpha_f - a.beta_f));
  out.d2 = params.l1 * std::sin(deg_to_rad(a.alpha_f));
  out.d3 = params.l1 * std::sin(deg_to_rad(-a.alpha_b));
  out.d4 = params.l2 * std::sin(deg_to_rad(a.beta_b - a.alpha_b));
  out.d5 = params.d5;
  out.total = out.d1 + out.d2 + out.d3 + out.d4 + out.d5;
  return out;
}

void assign_lengths(std::span<StepMeasurement> steps,
                    const StaticParams& params) {
  for (auto& s : steps) s.length = step_length(params, s.angles).total;
}

double asymmetry_percent(double left_cm, double right_cm) {
  if (!(left_cm > 0.0) || !(right_cm > 0.0)) {
    fail_input("asymmetry needs positive step lengths (left=" +
               std::to_string(left_cm) + ", right=" +
               std::to_string(right_cm) + ")");
  }
  return std::abs(left_cm - right_cm) / (0.5 * (left_cm + right_cm)) * 100.0;
}

GaitAsymmetry gait_asymmetry(const Stride& stride) {
  return {stride.index,
          asymmetry_percent(stride.left_length(), stride.right_length())};
}

}  // namespace gait
