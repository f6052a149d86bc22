#include <doctest.h>

#include <filesystem>
#include <random>
#include <string>

#include "gait/error.hpp"
#include "gait/io.hpp"
#include "gait/synth.hpp"
#include "support.hpp"

using namespace gait;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gaitkit_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

bool contains(const std::string& text, const std::string& part) {
  return text.find(part) != std::string::npos;
}

std::string error_text(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidInput);
    return e.what();
  }
  FAIL("expected an input error");
  return {};
}

constexpr std::string_view kProfile =
    "# subject S1\n"
    "l1_cm = 31.5\n"
    "l2_cm = 44\n"
    "d5_cm = 13.2   # thigh\n"
    "\n"
    "rls_lambda = 0.97\n"
    "mounting_axis = z_down_x_forward\n";

}  // namespace

TEST_CASE("decimal text is fixed six-digit and round-trips") {
  CHECK(format_decimal(1.5) == "1.500000");
  CHECK(format_decimal(-0.0) == "0.000000");
  CHECK(format_decimal(-1e-9) == "0.000000");
  CHECK(format_decimal(-2.25) == "-2.250000");
  CHECK(parse_decimal("12.5") == 12.5);
  CHECK(parse_decimal("-3") == -3.0);
  CHECK_FALSE(parse_decimal("1.2.3").has_value());
  CHECK_FALSE(parse_decimal("").has_value());
  CHECK_FALSE(parse_decimal("4x").has_value());

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-300.0, 300.0);
  for (int i = 0; i < 10000; ++i) {
    const std::string text = format_decimal(u(rng));
    const double x = *parse_decimal(text);
    CHECK(format_decimal(x) == text);
    CHECK(*parse_decimal(format_decimal(x)) == x);
  }
}

TEST_CASE("sample CSVs round-trip bit for bit") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> a(-8.0, 8.0), g(-250.0, 250.0), b(-90.0, 90.0);
  std::vector<ImuSample> imu;
  std::vector<BendSample> bend;
  for (int k = 0; k < 500; ++k) {
    ImuSample s{k / 250.0, {a(rng), a(rng), a(rng)}, {g(rng), g(rng), g(rng)}};
    imu.push_back(*parse_imu_csv(format_imu_csv({s}), "seed").begin());
    bend.push_back(*parse_bend_csv(format_bend_csv({{k / 100.0, b(rng)}}), "seed").begin());
  }
  const std::string imu_text = format_imu_csv(imu);
  const std::string bend_text = format_bend_csv(bend);
  CHECK(imu_text.rfind(std::string(kImuHeader) + "\n", 0) == 0);
  const auto imu_back = parse_imu_csv(imu_text, "imu");
  const auto bend_back = parse_bend_csv(bend_text, "bend");
  REQUIRE(imu_back.size() == imu.size());
  REQUIRE(bend_back.size() == bend.size());
  for (std::size_t i = 0; i < imu.size(); ++i) {
    CHECK(imu_back[i].t == imu[i].t);
    CHECK(imu_back[i].accel == imu[i].accel);
    CHECK(imu_back[i].gyro == imu[i].gyro);
    CHECK(bend_back[i].angle == bend[i].angle);
  }
  CHECK(format_imu_csv(imu_back) == imu_text);
  CHECK(format_bend_csv(bend_back) == bend_text);
}

TEST_CASE("a three-row bend file gives three samples") {
  ParseReport r;
  const auto s = parse_bend_csv("t,angle_deg\n0.00,5.0\n0.01,5.5\n0.02,6.25\n", "b.csv", &r);
  REQUIRE(s.size() == 3);
  CHECK(s[2].t == 0.02);
  CHECK(s[2].angle == 6.25);
  CHECK(r.rows == 3);
  CHECK(r.messages.empty());
}

TEST_CASE("out-of-range and non-finite rows") {
  ParseReport r;
  const auto s = parse_imu_csv(
      "t,ax,ay,az,gx,gy,gz\n"
      "0.000,0,0,1,0,0,0\n"
      "0.004,9.0,0,1,0,0,0\n"
      "0.008,0,0,1,0,nan,0\n"
      "0.012,0,0,1,0,0,300\n"
      "0.016,0,0,1,0,0,0\n",
      "L_imu.csv", &r);
  CHECK(s.size() == 2);
  CHECK(r.rejected_range == 2);
  CHECK(r.dropped_nonfinite == 1);
  REQUIRE(r.messages.size() == 2);
  CHECK(contains(r.messages[0], "L_imu.csv:3"));
  CHECK(contains(r.messages[0], "8g"));
  CHECK(contains(r.messages[1], "250 deg/s"));
}

TEST_CASE("malformed files name the file and line") {
  CHECK(contains(error_text([] { parse_bend_csv("t,angle\n0,1\n", "k.csv"); }),
                 "k.csv:1"));
  CHECK(contains(error_text([] { parse_imu_csv("t,ax,ay,az,gx,gy,gz\n0,0,0,1,0,0\n", "i.csv"); }),
                 "i.csv:2"));
  CHECK(contains(error_text([] { parse_bend_csv("t,angle_deg\n0,abc\n", "k.csv"); }),
                 "k.csv:2"));
  CHECK(contains(error_text([] { parse_bend_csv("", "e.csv"); }), "e.csv"));
  CHECK(contains(error_text([] { read_bend_csv("/nonexistent/x.csv"); }), "x.csv"));
}

TEST_CASE("trial files save and load") {
  const fs::path dir = scratch_dir("trial");
  GaitProfile p;
  p.step_lengths = constant_lengths(12, 60.0);
  const SynthAngles angles = synthesize_angles(p);
  const RawTrial raw = synthesize_raw(p, angles);
  const TrialFiles files = trial_files(dir, "t1");
  CHECK(files.imu[0].filename() == "t1_L_imu.csv");
  CHECK(files.bend[1].filename() == "t1_R_bend.csv");
  CHECK(files.reference.filename() == "t1_ref.csv");
  save_trial(files, raw, angles.truth);

  const LoadedTrial t = load_trial(files);
  REQUIRE(t.references.has_value());
  CHECK(t.references->size() == 12);
  CHECK(t.streams.imu[1].size() == raw.imu[1].size());
  CHECK(t.streams.bend[0].size() == raw.bend[0].size());
  CHECK(std::abs(t.streams.imu[0][400].accel[0] - raw.imu[0][400].accel[0]) <= 5e-7);
  CHECK((*t.references)[3].side == Side::Right);
  CHECK((*t.references)[3].length_cm == doctest::Approx(60.0).epsilon(1e-6));

  const auto truth = read_truth_csv(files.truth);
  REQUIRE(truth.size() == 12);
  CHECK(truth[5].t_front == doctest::Approx(angles.truth.steps[5].t_front).epsilon(1e-6));

  fs::remove(files.reference);
  CHECK_FALSE(load_trial(files).references.has_value());
  fs::remove_all(dir);
}

TEST_CASE("profile parsing") {
  const SubjectProfile p = parse_profile(kProfile, "s1.profile");
  CHECK(p.nominal == StaticParams{31.5, 44.0, 13.2});
  CHECK_FALSE(p.fitted.has_value());
  CHECK(p.active_params() == p.nominal);
  CHECK(p.rls_lambda == 0.97);
  CHECK(p.mounting == Mounting::ZDownXForward);
  CHECK(p.madgwick_beta == 0.1);

  const SubjectProfile back = parse_profile(format_profile(p), "again");
  CHECK(back.nominal == p.nominal);
  CHECK(back.rls_lambda == p.rls_lambda);
  CHECK(back.mounting == p.mounting);

  SubjectProfile fitted = p;
  fitted.fitted = StaticParams{33.0, 41.0, 14.0};
  fitted.bias = AngleBias{-1.0, 2.0, 0.5, 0.0};
  const SubjectProfile fb = parse_profile(format_profile(fitted), "fitted");
  REQUIRE(fb.fitted.has_value());
  CHECK(fb.active_params() == StaticParams{33.0, 41.0, 14.0});
  CHECK(fb.bias == fitted.bias);
  CHECK(fb.pipeline_config().bias == *fitted.bias);
}

TEST_CASE("profile errors") {
  const std::string base(kProfile);
  CHECK(contains(error_text([&] { parse_profile(base + "speed = 3\n", "p"); }), "p:8"));
  CHECK(contains(error_text([&] { parse_profile(base + "l1_cm = 30\n", "p"); }), "duplicate"));
  CHECK(contains(error_text([] { parse_profile("l1_cm = 30\nl2_cm = 45\n", "p"); }), "d5_cm"));
  CHECK(contains(error_text([&] { parse_profile(base + "rls_lambda = 0.5\n", "p"); }), "p:8"));
  CHECK(contains(error_text([&] { parse_profile(base + "fitted_l1_cm = 31\n", "p"); }),
                 "together"));
  // 10% box around nominal l2 = 44 is [39.6, 48.4].
  CHECK(contains(error_text([&] {
                   parse_profile(base + "fitted_l1_cm = 31.5\nfitted_l2_cm = 39\n"
                                        "fitted_d5_cm = 13.2\n", "p");
                 }),
                 "calibration box"));
  CHECK_NOTHROW(parse_profile(base + "fitted_l1_cm = 31.5\nfitted_l2_cm = 39.6\n"
                                     "fitted_d5_cm = 13.2\n", "p"));
}

TEST_CASE("error statistics") {
  const ErrorStats s = error_stats({110.0, 90.0, 50.0}, {100.0, 100.0, 50.0});
  CHECK(s.n == 3);
  CHECK(s.mape_pct == doctest::Approx(20.0 / 3.0));
  CHECK(s.rmse == doctest::Approx(std::sqrt(200.0 / 3.0)));
  CHECK_THROWS_AS(error_stats({1.0}, {1.0, 2.0}), Error);
}

TEST_CASE("metrics match steps by index and side") {
  const std::vector<double> est = {61, 59, 62, 58, 60, 61, 59, 60, 62, 58};
  const auto steps = fixture::steps(est);
  const auto strides = stride_metrics(steps);
  std::vector<ReferenceStep> refs;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    refs.push_back({i, 60.0, steps[i].front_side});
  }
  refs.push_back({99, 60.0, Side::Left});
  const Metrics m = compute_metrics(steps, strides, refs);
  CHECK(m.step.n == 10);
  CHECK(m.step.mape_pct == doctest::Approx(100.0 * 12.0 / 600.0));
  CHECK(m.stride.n == 5);
  CHECK(m.total_estimated_cm == doctest::Approx(600.0));
  CHECK(m.total_reference_cm == doctest::Approx(600.0));
  CHECK(m.unmatched_steps == 0);
  // Signed errors cancel over the whole walk.
  std::vector<ReferenceStep> matched(refs.begin(), refs.end() - 1);
  const Metrics mm = compute_metrics(steps, strides, matched);
  CHECK(mm.total_distance_pct < mm.step.mape_pct);
  CHECK(mm.total_distance_pct == doctest::Approx(0.0));

  refs[2].side = Side::Right;
  CHECK(compute_metrics(steps, strides, refs).step.n == 9);
}

TEST_CASE("report without references has an empty metrics block") {
  AnalysisResult r;
  r.steps = fixture::steps({60, 61, 59, 60});
  r.strides = stride_metrics(r.steps);
  r.output_rate = 25.0;
  ReportContext ctx;
  ctx.trial = "t";
  ctx.params = {30, 45, 14};
  ctx.params_source = "nominal";
  const auto j = make_report(r, ctx);
  CHECK(j.at("metrics").is_object());
  CHECK(j.at("metrics").empty());
  CHECK(j.at("steps").size() == 4);
  CHECK(j.at("strides").size() == 2);
  CHECK(j.at("calibration").at("bias").is_null());
  CHECK(j.at("steps")[1].at("side") == "R");

  ctx.metrics = compute_metrics(r.steps, r.strides,
                                std::vector<ReferenceStep>{{0, 60.0, Side::Left}, {1, 60.0, Side::Right}});
  const auto with = make_report(r, ctx);
  CHECK(with.at("metrics").at("step_length").at("n") == 2);
}
