#include <poll.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>

#include "gait/commands.hpp"
#include "gait/error.hpp"

namespace gait {

using nlohmann::json;

CalibrationMode parse_calibration_mode(std::string_view text) {
  if (text == "batch") return CalibrationMode::Batch;
  if (text == "rls") return CalibrationMode::Rls;
  fail_input("unknown calibration mode '" + std::string(text) +
             "' (expected batch or rls)");
}

ReferencedSteps referenced_steps(const std::vector<StepMeasurement>& steps,
                                 const std::vector<ReferenceStep>& refs) {
  std::map<std::pair<std::size_t, Side>, const ReferenceStep*> by_key;
  for (const ReferenceStep& r : refs) by_key[{r.step_index, r.side}] = &r;
  ReferencedSteps out;
  for (const StepMeasurement& s : steps) {
    auto it = by_key.find({s.index, s.front_side});
    if (it == by_key.end()) continue;
    out.steps.push_back(s);
    out.refs.push_back(*it->second);
  }
  return out;
}

double model_mape(std::span<const StepMeasurement> steps,
                  std::span<const ReferenceStep> refs,
                  const StaticParams& params, const AngleBias& bias) {
  if (steps.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const double d = step_length(params, apply_bias(steps[i].angles, bias)).total;
    sum += std::abs(d - refs[i].length_cm) / refs[i].length_cm;
  }
  return 100.0 * sum / static_cast<double>(steps.size());
}

namespace {

json params_json(const StaticParams& p) {
  return {{"l1_cm", p.l1}, {"l2_cm", p.l2}, {"d5_cm", p.d5}};
}

json bias_json(const AngleBias& b) {
  return {{"alpha_f", b.alpha_f}, {"beta_f", b.beta_f},
          {"alpha_b", b.alpha_b}, {"beta_b", b.beta_b}};
}

void add_parse_messages(PipelineDiagnostics& d, const ParseReport& r) {
  std::vector<std::string> msgs = r.messages;
  if (r.dropped_nonfinite > 0) {
    msgs.push_back(std::to_string(r.dropped_nonfinite) +
                   " rows with non-finite values dropped");
  }
  d.messages.insert(d.messages.begin(), msgs.begin(), msgs.end());
}

PipelineConfig raw_config(const SubjectProfile& profile) {
  PipelineConfig c = profile.pipeline_config();
  c.params = profile.nominal;
  c.bias = {};
  return c;
}

StaticParams clamp_to_box(const StaticParams& p, const StaticParams& n,
                          bool* clamped) {
  auto clamp = [&](double v, double nominal) {
    const double half = kCalibrationBoxFraction * std::abs(nominal);
    const double c = std::clamp(v, nominal - half, nominal + half);
    if (c != v) *clamped = true;
    return c;
  };
  return {clamp(p.l1, n.l1), clamp(p.l2, n.l2), clamp(p.d5, n.d5)};
}

struct Split {
  std::span<const StepMeasurement> train_steps, test_steps;
  std::span<const ReferenceStep> train_refs, test_refs;
};

Split split(const ReferencedSteps& rs) {
  const std::size_t n = training_count(rs.steps.size());
  std::span<const StepMeasurement> s(rs.steps);
  std::span<const ReferenceStep> r(rs.refs);
  return {s.first(n), s.subspan(n), r.first(n), r.subspan(n)};
}

// Bias fit on the training split; an unidentifiable angle is a calibration
// failure rather than bad input.
BiasFitResult fit_bias_on(const Split& sp, const StaticParams& params) {
  try {
    return batch_fit_biases(sp.train_steps, sp.train_refs, params,
                            mean_angles(sp.train_steps));
  } catch (const Error& e) {
    fail_calibration(std::string("bias fit failed: ") + e.what());
  }
}

}  // namespace

CalibrationOutcome calibrate_trial(const LoadedTrial& trial,
                                   const SubjectProfile& profile,
                                   CalibrationMode mode, bool fit_bias) {
  if (!trial.references) fail_input("calibration needs a reference file");
  const AnalysisResult r = analyze(trial.streams, raw_config(profile));
  const ReferencedSteps rs = referenced_steps(r.steps, *trial.references);
  const std::size_t n = rs.steps.size();
  const std::size_t need =
      mode == CalibrationMode::Batch ? kMinBatchReferences : kMinRlsReferences;
  if (n < need) {
    fail_calibration("calibration needs at least " + std::to_string(need) +
                     " referenced steps, found " + std::to_string(n));
  }

  CalibrationOutcome out;
  out.profile = profile;
  json& s = out.summary;
  s["nominal"] = params_json(profile.nominal);
  s["referenced_steps"] = n;

  if (mode == CalibrationMode::Batch) {
    const Split sp = split(rs);
    const CalibrationResult fit =
        batch_fit_params(sp.train_steps, sp.train_refs, profile.nominal);
    out.profile.fitted = fit.params;
    out.profile.bias.reset();
    s["mode"] = "batch";
    s["training_steps"] = sp.train_steps.size();
    s["test_steps"] = sp.test_steps.size();
    s["fitted"] = params_json(fit.params);
    s["degenerate"] = fit.degenerate;
    s["diagnostics"] = fit.diagnostics;
    s["train_sse_cm2"] = {{"nominal", fit.sse_before}, {"fitted", fit.sse_after}};
    json mape = {
        {"nominal", model_mape(sp.test_steps, sp.test_refs, profile.nominal)},
        {"fitted", model_mape(sp.test_steps, sp.test_refs, fit.params)}};
    if (fit_bias) {
      const BiasFitResult bf = fit_bias_on(sp, fit.params);
      out.profile.bias = bf.bias;
      s["bias"] = bias_json(bf.bias);
      s["bias_fit"] = {{"iterations", bf.iterations},
                       {"converged", bf.converged},
                       {"train_sse_cm2_before", bf.sse_before},
                       {"train_sse_cm2_after", bf.sse_after}};
      mape["fitted_bias"] =
          model_mape(sp.test_steps, sp.test_refs, fit.params, bf.bias);
    }
    s["test_mape_pct"] = mape;
  } else {
    RlsState st = rls_init(profile.nominal, profile.rls_p0, profile.rls_lambda);
    for (std::size_t i = 0; i < n; ++i) {
      st = rls_update(st, feature_vector(rs.steps[i].angles), rs.refs[i].length_cm);
    }
    bool clamped = false;
    const StaticParams w = clamp_to_box(st.params(), profile.nominal, &clamped);
    out.profile.fitted = w;
    out.profile.bias.reset();
    s["mode"] = "rls";
    s["updates"] = st.updates;
    s["rls_estimate"] = params_json(st.params());
    s["fitted"] = params_json(w);
    s["clamped_to_box"] = clamped;
    s["in_sample_mape_pct"] = {
        {"nominal", model_mape(rs.steps, rs.refs, profile.nominal)},
        {"fitted", model_mape(rs.steps, rs.refs, w)}};
  }
  out.profile.validate();
  return out;
}

ReportContext report_context(const std::string& trial,
                             const SubjectProfile& profile) {
  ReportContext c;
  c.trial = trial;
  c.params = profile.active_params();
  c.params_source = profile.fitted ? "fitted" : "nominal";
  c.bias = profile.bias;
  return c;
}

json analyze_trial(const LoadedTrial& trial, const SubjectProfile& profile,
                   const std::string& name) {
  AnalysisResult r = analyze(trial.streams, profile.pipeline_config());
  add_parse_messages(r.diagnostics, trial.report);
  ReportContext c = report_context(name, profile);
  if (trial.references) {
    c.metrics = compute_metrics(r.steps, r.strides, *trial.references);
  }
  return make_report(r, c);
}

void emit_update(const StepAccumulator::Update& u, const JsonSink& sink) {
  for (const auto& s : u.steps) {
    json j = to_json(s);
    j["type"] = "step";
    sink(j);
  }
  for (const auto& s : u.strides) {
    json j = to_json(s);
    j["type"] = "stride";
    sink(j);
  }
  for (const auto& e : u.feedback) {
    json j = to_json(e);
    j["type"] = "feedback";
    sink(j);
  }
}

namespace {

void emit_summary(const AnalysisResult& r, const LoadedTrial* trial,
                  const SubjectProfile& profile, const std::string& name,
                  const JsonSink& sink) {
  ReportContext c = report_context(name, profile);
  if (trial && trial->references) {
    c.metrics = compute_metrics(r.steps, r.strides, *trial->references);
  }
  sink({{"type", "summary"}, {"report", make_report(r, c)}});
}

}  // namespace

AnalysisResult replay_trial(const LoadedTrial& trial,
                            const SubjectProfile& profile,
                            const std::string& name, const JsonSink& sink) {
  StreamProcessor proc(profile.pipeline_config());
  const TrialStreams& ts = trial.streams;
  std::array<std::size_t, 4> next{};
  const std::array<std::size_t, 4> size = {ts.imu[0].size(), ts.imu[1].size(),
                                           ts.bend[0].size(), ts.bend[1].size()};
  auto time_of = [&](std::size_t src) {
    const std::size_t k = next[src];
    return src < 2 ? ts.imu[src][k].t : ts.bend[src - 2][k].t;
  };
  for (;;) {
    std::size_t best = 4;
    for (std::size_t src = 0; src < 4; ++src) {
      if (next[src] == size[src]) continue;
      if (best == 4 || time_of(src) < time_of(best)) best = src;
    }
    if (best == 4) break;
    const std::size_t k = next[best]++;
    const StepAccumulator::Update u =
        best < 2 ? proc.push_imu(static_cast<Side>(best), ts.imu[best][k])
                 : proc.push_bend(static_cast<Side>(best - 2), ts.bend[best - 2][k]);
    emit_update(u, sink);
  }
  emit_update(proc.finish(), sink);
  AnalysisResult r = proc.result();
  add_parse_messages(r.diagnostics, trial.report);
  emit_summary(r, &trial, profile, name, sink);
  return r;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

class LineFeeder {
 public:
  LineFeeder(StreamProcessor& proc, ParseReport& report, const JsonSink& sink)
      : proc_(proc), report_(report), sink_(sink) {}

  void line(std::string_view text, std::size_t line_no) {
    if (!text.empty() && text.back() == '\r') text.remove_suffix(1);
    if (text.empty() || text.front() == '#') return;
    const std::string where = "stdin:" + std::to_string(line_no);
    const auto f = split_fields(text);
    const std::string_view src = f[0];
    const bool imu = src == "L_imu" || src == "R_imu";
    const bool bend = src == "L_bend" || src == "R_bend";
    if (!imu && !bend) {
      fail_input(where + ": unknown source '" + std::string(src) +
                 "' (expected L_imu, R_imu, L_bend or R_bend)");
    }
    const std::size_t want = imu ? 8 : 3;
    if (f.size() != want) {
      fail_input(where + ": expected " + std::to_string(want) +
                 " fields, got " + std::to_string(f.size()));
    }
    double v[7];
    bool finite = true;
    for (std::size_t i = 1; i < want; ++i) {
      const auto x = parse_decimal(f[i]);
      if (!x) fail_input(where + ": '" + std::string(f[i]) + "' is not a number");
      v[i - 1] = *x;
      finite = finite && std::isfinite(*x);
    }
    ++report_.rows;
    if (!finite) {
      ++report_.dropped_nonfinite;
      return;
    }
    const Side side = src[0] == 'L' ? Side::Left : Side::Right;
    if (imu) {
      const ImuSample s{v[0], {v[1], v[2], v[3]}, {v[4], v[5], v[6]}};
      if (auto msg = range_violation(s)) return reject(where, *msg);
      emit_update(proc_.push_imu(side, s), sink_);
    } else {
      const BendSample s{v[0], v[1]};
      if (auto msg = range_violation(s)) return reject(where, *msg);
      emit_update(proc_.push_bend(side, s), sink_);
    }
  }

 private:
  void reject(const std::string& where, const std::string& msg) {
    ++report_.rejected_range;
    report_.messages.push_back(where + ": row rejected: " + msg);
  }

  StreamProcessor& proc_;
  ParseReport& report_;
  const JsonSink& sink_;
};

}  // namespace

AnalysisResult stream_fd(int fd, double stall_timeout_s,
                         const SubjectProfile& profile, const std::string& name,
                         const JsonSink& sink) {
  if (!(stall_timeout_s > 0.0)) fail_input("stall timeout must be > 0");
  StreamProcessor proc(profile.pipeline_config());
  ParseReport report;
  LineFeeder feeder(proc, report, sink);
  std::string pending;
  std::size_t line_no = 0;
  char buf[65536];
  const int timeout_ms = static_cast<int>(std::ceil(stall_timeout_s * 1000.0));
  for (;;) {
    pollfd p{fd, POLLIN, 0};
    const int ready = ::poll(&p, 1, timeout_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      fail_input(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) {
      fail_input("input stalled for more than " +
                 format_decimal(stall_timeout_s) + " s");
    }
    const ssize_t got = ::read(fd, buf, sizeof buf);
    if (got < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      fail_input(std::string("read failed: ") + std::strerror(errno));
    }
    if (got == 0) break;
    pending.append(buf, static_cast<std::size_t>(got));
    std::size_t start = 0;
    for (std::size_t nl; (nl = pending.find('\n', start)) != std::string::npos;
         start = nl + 1) {
      feeder.line(std::string_view(pending).substr(start, nl - start), ++line_no);
    }
    pending.erase(0, start);
  }
  if (!pending.empty()) feeder.line(pending, ++line_no);
  emit_update(proc.finish(), sink);
  AnalysisResult r = proc.result();
  add_parse_messages(r.diagnostics, report);
  emit_summary(r, nullptr, profile, name, sink);
  return r;
}

std::vector<std::string> discover_trials(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    fail_input(dir.string() + " is not a directory");
  }
  const std::string suffix = "_L_imu.csv";
  std::vector<std::string> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const std::string f = entry.path().filename().string();
    if (f.size() > suffix.size() &&
        f.compare(f.size() - suffix.size(), suffix.size(), suffix) == 0) {
      out.push_back(f.substr(0, f.size() - suffix.size()));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

json eval_directory(const std::filesystem::path& dir,
                    const SubjectProfile& profile) {
  json trials = json::array();
  std::vector<double> per_trial[3];
  for (const std::string& name : discover_trials(dir)) {
    const LoadedTrial t = load_trial(trial_files(dir, name));
    json row = {{"trial", name}};
    if (!t.references) {
      row["skipped"] = "no reference file";
      trials.push_back(row);
      continue;
    }
    const AnalysisResult r = analyze(t.streams, raw_config(profile));
    const ReferencedSteps rs = referenced_steps(r.steps, *t.references);
    row["referenced_steps"] = rs.steps.size();
    if (rs.steps.size() < kMinBatchReferences) {
      row["skipped"] = "fewer than " + std::to_string(kMinBatchReferences) +
                       " referenced steps";
      trials.push_back(row);
      continue;
    }
    const Split sp = split(rs);
    const CalibrationResult fit =
        batch_fit_params(sp.train_steps, sp.train_refs, profile.nominal);
    const double m_nominal =
        model_mape(sp.test_steps, sp.test_refs, profile.nominal);
    const double m_batch = model_mape(sp.test_steps, sp.test_refs, fit.params);
    row["fitted"] = params_json(fit.params);
    json mape = {{"nominal", m_nominal}, {"batch", m_batch}};
    per_trial[0].push_back(m_nominal);
    per_trial[1].push_back(m_batch);
    try {
      const BiasFitResult bf = fit_bias_on(sp, fit.params);
      const double m_bias =
          model_mape(sp.test_steps, sp.test_refs, fit.params, bf.bias);
      mape["batch_bias"] = m_bias;
      row["bias"] = bias_json(bf.bias);
      per_trial[2].push_back(m_bias);
    } catch (const Error& e) {
      row["bias_fit_error"] = e.what();
    }
    row["test_mape_pct"] = mape;
    row["training_steps"] = sp.train_steps.size();
    row["test_steps"] = sp.test_steps.size();
    trials.push_back(row);
  }
  auto mean = [](const std::vector<double>& v) -> json {
    if (v.empty()) return nullptr;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  return {{"directory", dir.string()},
          {"protocol", "leading 70% of referenced steps train, remaining 30% test"},
          {"trials", trials},
          {"mean_test_mape_pct",
           {{"nominal", mean(per_trial[0])},
            {"batch", mean(per_trial[1])},
            {"batch_bias", mean(per_trial[2])}}}};
}

}  // namespace gait
