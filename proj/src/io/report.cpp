#include "gait/io.hpp"

namespace gait {

using nlohmann::json;

namespace {

json angles_json(const EventAngles& a) {
  return {{"alpha_f", a.alpha_f}, {"beta_f", a.beta_f},
          {"alpha_b", a.alpha_b}, {"beta_b", a.beta_b}};
}

json stats_json(const ErrorStats& s, const char* unit) {
  return {{"n", s.n}, {"mape_pct", s.mape_pct}, {"rmse", s.rmse}, {"unit", unit}};
}

json params_json(const StaticParams& p) {
  return {{"l1_cm", p.l1}, {"l2_cm", p.l2}, {"d5_cm", p.d5}};
}

json bias_json(const AngleBias& b) {
  return {{"alpha_f", b.alpha_f}, {"beta_f", b.beta_f},
          {"alpha_b", b.alpha_b}, {"beta_b", b.beta_b}};
}

json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

}  // namespace

json to_json(const StepMeasurement& s) {
  return {{"index", s.index},
          {"side", to_string(s.front_side)},
          {"length_cm", s.length},
          {"t_front", s.t_front_event},
          {"t_back", s.t_back_event},
          {"angles", angles_json(s.angles)}};
}

json to_json(const Stride& s) {
  return {{"index", s.index},
          {"side", to_string(s.tracked_side())},
          {"steps", json::array({s.step_a.index, s.step_b.index})},
          {"length_cm", s.length},
          {"left_cm", s.left_length()},
          {"right_cm", s.right_length()},
          {"stride_time_s", s.stride_time},
          {"stance_s", s.stance_time},
          {"swing_s", s.swing_time},
          {"velocity_mps", s.velocity},
          {"velocity_window", s.velocity_window},
          {"velocity_partial", s.velocity_partial},
          {"time_extrapolated", s.time_extrapolated},
          {"asymmetry_pct", gait_asymmetry(s).percent}};
}

json to_json(const FeedbackEvent& e) {
  json j = {{"kind", to_string(e.kind)},
            {"index", e.index},
            {"onset_index", e.onset_index},
            {"value", e.value},
            {"threshold", e.threshold},
            {"t", e.t}};
  j["side"] = e.side ? json(to_string(*e.side)) : json(nullptr);
  return j;
}

json to_json(const Metrics& m) {
  return {{"step_length", stats_json(m.step, "cm")},
          {"stride_length", stats_json(m.stride, "cm")},
          {"velocity", stats_json(m.velocity, "m/s")},
          {"total_distance",
           {{"estimated_cm", m.total_estimated_cm},
            {"reference_cm", m.total_reference_cm},
            {"error_pct", m.total_distance_pct}}},
          {"unmatched_steps", m.unmatched_steps},
          {"velocity_windowing",
           "reference velocity uses the same stride pairing, stride times and "
           "trailing five-stride windows as the estimate"}};
}

json make_report(const AnalysisResult& r, const ReportContext& c) {
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back(to_json(s));
  json strides = json::array();
  for (const auto& s : r.strides) strides.push_back(to_json(s));
  json feedback = json::array();
  for (const auto& e : r.feedback) feedback.push_back(to_json(e));

  json offsets = json::object();
  for (std::size_t leg = 0; leg < 2; ++leg) {
    offsets[leg == 0 ? "L" : "R"] = {
        {"accel_g", vec_json(r.offsets.imu[leg].accel)},
        {"gyro_dps", vec_json(r.offsets.imu[leg].gyro)},
        {"bend_deg", r.offsets.bend[leg]}};
  }
  json calibration = {{"params", params_json(c.params)},
                      {"source", c.params_source},
                      {"offsets", offsets}};
  calibration["bias"] = c.bias ? bias_json(*c.bias) : json(nullptr);

  const PipelineDiagnostics& d = r.diagnostics;
  json diagnostics = {{"messages", d.messages},
                      {"discarded_steps", d.discarded_steps},
                      {"ignored_minima", d.ignored_minima},
                      {"unpaired_steps", d.unpaired_steps},
                      {"alignment_skew_s", d.alignment_skew_s},
                      {"gyro_only_updates", d.gyro_only_updates}};

  return {{"trial", c.trial},
          {"output_rate_hz", r.output_rate},
          {"latency_samples", 2},
          {"steps", steps},
          {"strides", strides},
          {"feedback", feedback},
          {"metrics", c.metrics ? to_json(*c.metrics) : json::object()},
          {"calibration", calibration},
          {"diagnostics", diagnostics}};
}

}  // namespace gait
