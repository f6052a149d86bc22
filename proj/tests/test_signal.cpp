#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "gait/error.hpp"
#include "gait/signal.hpp"

using namespace gait;

namespace {

std::vector<BendSample> bend_stream(const std::vector<double>& angles,
                                    double rate = kBendNativeRate) {
  std::vector<BendSample> s;
  for (std::size_t i = 0; i < angles.size(); ++i) {
    s.push_back({static_cast<double>(i) / rate, angles[i]});
  }
  return s;
}

std::vector<ImuSample> imu_stream(std::size_t n, Vec3 accel, Vec3 gyro) {
  std::vector<ImuSample> s;
  for (std::size_t i = 0; i < n; ++i) {
    s.push_back({static_cast<double>(i) / kImuNativeRate, accel, gyro});
  }
  return s;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Invariant;
}

}  // namespace

TEST_CASE("range checks") {
  CHECK_FALSE(range_violation(ImuSample{0, {0, 0, 1}, {0, 0, 0}}));
  const auto accel = range_violation(ImuSample{0, {9, 0, 1}, {0, 0, 0}});
  REQUIRE(accel);
  CHECK(accel->find("8g") != std::string::npos);
  CHECK(range_violation(ImuSample{0, {0, 0, 1}, {0, 300, 0}}));
  CHECK(range_violation(BendSample{0, 181}));
  CHECK_FALSE(range_violation(BendSample{0, -179}));
}

TEST_CASE("median") {
  const std::vector<double> odd{5, 1, 3};
  const std::vector<double> even{4, 1, 3, 2};
  CHECK(median(odd) == 3.0);
  CHECK(median(even) == 2.5);
  CHECK_THROWS_AS(median(std::vector<double>{}), Error);
}

TEST_CASE("bend offset from a constant window") {
  const auto s = bend_stream(std::vector<double>(150, 3.0));
  CHECK(compute_bend_offset(s) == 3.0);
}

TEST_CASE("bend offset ignores an outlier") {
  std::vector<double> v;
  for (int r = 0; r < 30; ++r) {
    for (double x : {2.9, 3.0, 3.1, 3.0, 100.0}) v.push_back(x);
  }
  CHECK(compute_bend_offset(bend_stream(v)) == 3.0);
}

TEST_CASE("accelerometer offset keeps one g on the vertical axis") {
  const auto s = imu_stream(400, {0.0, 0.0, 1.02}, {0.5, -0.25, 0.0});
  const ImuOffsets o = compute_imu_offsets(s);
  CHECK(o.accel[2] == doctest::Approx(0.02));
  CHECK(o.gyro[0] == 0.5);
  CHECK(o.gyro[1] == -0.25);
  const ImuSample c = subtract_offsets(s[0], o);
  CHECK(c.accel[2] == doctest::Approx(1.0));
  CHECK(c.gyro[0] == 0.0);

  // Correcting twice changes nothing.
  std::vector<ImuSample> corrected;
  for (const auto& x : s) corrected.push_back(subtract_offsets(x, o));
  const ImuOffsets again = compute_imu_offsets(corrected);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(std::abs(again.accel[i]) < 1e-9);
    CHECK(std::abs(again.gyro[i]) < 1e-9);
  }
}

TEST_CASE("moving or short standing windows fail calibration") {
  std::vector<double> ramp;
  for (int i = 0; i < 200; ++i) ramp.push_back(0.1 * i);
  CHECK(kind_of([&] { compute_bend_offset(bend_stream(ramp)); }) ==
        ErrorKind::Calibration);
  CHECK(kind_of([&] { compute_bend_offset(bend_stream(std::vector<double>(10, 1.0))); }) ==
        ErrorKind::Calibration);
  // 50 samples at 100 Hz is only half a second.
  CHECK(kind_of([&] { compute_bend_offset(bend_stream(std::vector<double>(50, 1.0))); }) ==
        ErrorKind::Calibration);
}

TEST_CASE("downsample and smooth: worked values") {
  const std::vector<double> s{1, 2, 3, 4, 5, 6};
  const UniformSeries out = downsample_smooth(s, 0.0, 100.0, 2);
  REQUIRE(out.size() == 2);
  CHECK(out.values[0] == 2.5);
  CHECK(out.values[1] == 4.5);
  CHECK(out.rate == 50.0);
  CHECK(out.t0 == doctest::Approx(0.02));

  const std::vector<double> c(1000, 7.25);
  for (std::size_t m : {1u, 3u, 4u, 10u}) {
    for (double v : downsample_smooth(c, 0.0, 250.0, m).values) CHECK(v == 7.25);
  }
}

TEST_CASE("downsample and smooth: length, rate and window bounds") {
  for (std::size_t n : {20u, 21u, 29u, 30u, 2501u}) {
    for (std::size_t m : {2u, 4u, 10u}) {
      if (n < 2 * m) continue;
      std::vector<double> ramp(n);
      for (std::size_t i = 0; i < n; ++i) ramp[i] = static_cast<double>(i);
      const UniformSeries out = downsample_smooth(ramp, 1.0, 250.0, m);
      CHECK(out.size() == (n - 2 * m) / m + 1);
      CHECK(out.rate == doctest::Approx(250.0 / static_cast<double>(m)));
      for (std::size_t j = 0; j < out.size(); ++j) {
        // Mean of samples mj .. mj + 2m - 1.
        const double want = static_cast<double>(m * j) + (2.0 * m - 1.0) / 2.0;
        CHECK(out.values[j] == doctest::Approx(want));
      }
    }
  }
}

TEST_CASE("both sensors land on 25 Hz") {
  const auto bend = bend_stream(std::vector<double>(300, 0.0));
  const auto imu = imu_stream(750, {0, 0, 1}, {0, 0, 0});
  CHECK(downsample_smooth(bend, kBendNativeRate, kBendDownsample).rate == 25.0);
  CHECK(downsample_smooth(imu, kImuNativeRate, kImuDownsample).rate == 25.0);
}

TEST_CASE("a 1 Hz sinusoid passes the 250 Hz smoother almost unchanged") {
  std::vector<double> s(2500);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 250.0);
  }
  const auto out = downsample_smooth(s, 0.0, 250.0, 10);
  double peak = 0.0;
  for (double v : out.values) peak = std::max(peak, std::abs(v));
  CHECK(peak > 0.95);
}

TEST_CASE("smoother rejects unusable input") {
  const std::vector<double> s(5, 1.0);
  CHECK_THROWS_AS(downsample_smooth(s, 0.0, 100.0, 0), Error);
  CHECK_THROWS_AS(downsample_smooth(s, 0.0, 100.0, 3), Error);
  CHECK_THROWS_AS(downsample_smooth(std::vector<double>{}, 0.0, 100.0, 2), Error);
}

TEST_CASE("streaming smoother matches the batch one bit for bit") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> d(0.0, 10.0);
  std::vector<double> s(1237);
  for (double& x : s) x = d(rng);
  for (std::size_t m : {1u, 4u, 10u}) {
    const auto batch = downsample_smooth(s, 0.0, 250.0, m);
    StreamingWindowMean w(m);
    std::vector<double> live;
    for (double x : s) {
      if (auto v = w.push(x)) live.push_back(*v);
    }
    REQUIRE(live.size() == batch.size());
    for (std::size_t j = 0; j < live.size(); ++j) CHECK(live[j] == batch.values[j]);
  }
}

TEST_CASE("timestamp audit") {
  std::vector<double> t;
  for (int i = 0; i < 500; ++i) t.push_back(i * 0.004);
  CHECK_FALSE(check_timestamps(t, 250.0).jitter_warning);

  // 1 ms of jitter on a 4 ms period is accepted with a warning.
  std::vector<double> jittered = t;
  for (std::size_t i = 1; i < jittered.size(); i += 5) jittered[i] += 0.001;
  const auto r = check_timestamps(jittered, 250.0);
  CHECK(r.jitter_warning);
  CHECK(r.max_jitter_s == doctest::Approx(0.001));

  std::vector<double> back = t;
  back[100] = back[98];
  CHECK(kind_of([&] { check_timestamps(back, 250.0); }) == ErrorKind::InvalidInput);

  // Samples at 100 Hz declared as 250 Hz.
  std::vector<double> slow;
  for (int i = 0; i < 100; ++i) slow.push_back(i * 0.01);
  CHECK_THROWS_AS(check_timestamps(slow, 250.0), Error);
}

TEST_CASE("incremental timestamp monitor") {
  TimestampMonitor m;
  for (int i = 0; i < 100; ++i) m.add(i * 0.01 + (i % 2 ? 0.003 : 0.0), 100.0, "left bend: ");
  CHECK(m.max_jitter_s() == doctest::Approx(0.003));
  const auto w = m.warning(100.0, "left bend: ");
  REQUIRE(w);
  CHECK(w->rfind("left bend: ", 0) == 0);
  try {
    m.add(0.5, 100.0, "left bend: ");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("backwards") != std::string::npos);
  }
}
