#include <doctest.h>

#include <random>

#include "gait/calibrate.hpp"
#include "gait/core.hpp"
#include "gait/error.hpp"
#include "support.hpp"

using namespace gait;

namespace {

const StaticParams kNominal{30.0, 45.0, 14.0};

struct Draw {
  StaticParams p;
  EventAngles a;
};

Draw random_draw(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> len(20.0, 60.0);
  std::uniform_real_distribution<double> d5(5.0, 20.0);
  std::uniform_real_distribution<double> hip_f(-10.0, 45.0);
  std::uniform_real_distribution<double> hip_b(-30.0, 15.0);
  std::uniform_real_distribution<double> knee(0.0, 70.0);
  return {{len(rng), len(rng), d5(rng)},
          {hip_f(rng), knee(rng), hip_b(rng), knee(rng)}};
}

}  // namespace

TEST_CASE("standing posture leaves only the thigh diameter") {
  const auto b = step_length(kNominal, {0, 0, 0, 0});
  CHECK(b.total == 14.0);
  CHECK(b.d1 == 0.0);
  CHECK(b.d2 == 0.0);
  CHECK(b.d3 == 0.0);
  CHECK(b.d4 == 0.0);
}

TEST_CASE("worked step with the back hip behind the torso") {
  const auto b = step_length(kNominal, {30, 10, -10, 15});
  CHECK(b.d1 == doctest::Approx(15.390).epsilon(1e-4));
  CHECK(b.d2 == doctest::Approx(15.000).epsilon(1e-9));
  CHECK(b.d3 == doctest::Approx(5.209).epsilon(1e-4));
  CHECK(b.d4 == doctest::Approx(19.018).epsilon(1e-4));
  CHECK(std::abs(b.total - 68.62) < 0.01);
  CHECK(std::abs(b.total - oracle::heel_distance(30, 45, 14, 30, 10, -10, 15)) < 1e-9);
}

TEST_CASE("worked step with the back hip in front of the torso") {
  const auto b = step_length(kNominal, {30, 10, 5, 15});
  CHECK(b.d3 == doctest::Approx(-2.615).epsilon(1e-3));
  CHECK(b.d4 == doctest::Approx(7.814).epsilon(1e-3));
  CHECK(std::abs(b.total - 49.59) < 0.01);
}

TEST_CASE("step length agrees with the geometric oracle on random draws") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Draw d = random_draw(rng);
    const double want = oracle::heel_distance(d.p.l1, d.p.l2, d.p.d5, d.a.alpha_f,
                                              d.a.beta_f, d.a.alpha_b, d.a.beta_b);
    REQUIRE(std::abs(step_length(d.p, d.a).total - want) < 1e-9);
  }
}

TEST_CASE("breakdown properties") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const Draw d = random_draw(rng);
    const auto b = step_length(d.p, d.a);
    CHECK(std::abs(b.total - (b.d1 + b.d2 + b.d3 + b.d4 + b.d5)) < 1e-12);
    CHECK(std::abs(b.total - feature_vector(d.a).dot(d.p)) < 1e-12);

    EventAngles neg = d.a;
    EventAngles pos = d.a;
    neg.alpha_b = -std::abs(d.a.alpha_b);
    pos.alpha_b = std::abs(d.a.alpha_b);
    const auto bn = step_length(d.p, neg);
    const auto bp = step_length(d.p, pos);
    CHECK(bn.d3 == -bp.d3);
    CHECK(bn.d1 == bp.d1);
    CHECK(bn.d2 == bp.d2);
    CHECK(bn.d5 == bp.d5);

    const double c = 1.7;
    const auto scaled = step_length({c * d.p.l1, c * d.p.l2, c * d.p.d5}, d.a);
    CHECK(scaled.total == doctest::Approx(c * b.total).epsilon(1e-12));
  }
}

TEST_CASE("static parameters are validated") {
  CHECK_THROWS_AS(validate(StaticParams{0, 45, 14}), Error);
  CHECK_THROWS_AS(validate(StaticParams{30, -1, 14}), Error);
  CHECK_THROWS_AS(validate(StaticParams{30, 45, std::nan("")}), Error);
  CHECK_NOTHROW(validate(kNominal));
  CHECK_FALSE(plausibility_warning(kNominal));
  CHECK(plausibility_warning(StaticParams{80, 40, 14}));
}

TEST_CASE("sides parse and print") {
  CHECK(parse_side("L") == Side::Left);
  CHECK(parse_side("right") == Side::Right);
  CHECK(to_string(Side::Right) == "R");
  CHECK_THROWS_AS(parse_side("X"), Error);
}

TEST_CASE("stride length is the sum of its two steps") {
  const auto strides = fixture::strides({{60, 62}});
  REQUIRE(strides.size() == 1);
  CHECK(strides[0].length == 122.0);
  CHECK(strides[0].left_length() == 60.0);
  CHECK(strides[0].right_length() == 62.0);
}

TEST_CASE("velocity over five strides") {
  // 1.2 m strides, 1.2 s each: five strides cover 6 m in 6 s.
  const auto strides = fixture::strides(std::vector<std::pair<double, double>>(6, {60, 60}), 0.6);
  REQUIRE(strides.size() == 6);
  CHECK(strides[0].velocity_partial);
  CHECK(strides[0].velocity_window == 1);
  CHECK(strides[4].velocity_window == 5);
  CHECK_FALSE(strides[4].velocity_partial);
  CHECK(strides[4].velocity == doctest::Approx(1.0).epsilon(1e-12));
  // The final stride has no following contact and extrapolates its time.
  CHECK(strides[5].time_extrapolated);
  CHECK_FALSE(strides[4].time_extrapolated);
}

TEST_CASE("stance and swing from a constructed event timeline") {
  // Left contacts every 1.0 s; left foot-off (the back-limb event of the
  // following right step) 0.6 s after each left contact.
  std::vector<StepMeasurement> steps;
  for (std::size_t i = 0; i < 8; ++i) {
    StepMeasurement s;
    s.index = i;
    s.front_side = i % 2 == 0 ? Side::Left : Side::Right;
    s.t_front_event = 1.0 + 0.5 * static_cast<double>(i);
    s.t_back_event = s.t_front_event + 0.1;
    s.length = 60;
    steps.push_back(s);
  }
  const auto strides = stride_metrics(steps);
  REQUIRE(strides.size() == 4);
  for (std::size_t i = 0; i + 1 < strides.size(); ++i) {
    CHECK(strides[i].stride_time == doctest::Approx(1.0));
    CHECK(strides[i].stance_time == doctest::Approx(0.6));
    CHECK(strides[i].swing_time == doctest::Approx(0.4));
  }
}

TEST_CASE("stride assembly rejects bad input") {
  CHECK_THROWS_AS(stride_metrics(fixture::steps({60})), Error);
  auto s = fixture::steps({60, 60, 60, 60});
  s[2].front_side = Side::Right;
  try {
    stride_metrics(s);
    FAIL("expected an invariant error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Invariant);
  }
}

TEST_CASE("percentage asymmetry") {
  CHECK(asymmetry_percent(60, 60) == 0.0);
  CHECK(asymmetry_percent(60, 40) == doctest::Approx(40.0).epsilon(1e-12));
  CHECK(asymmetry_percent(60, 40) > kDefaultAsymmetryThresholdPct);
  CHECK_THROWS_AS(asymmetry_percent(0, 40), Error);
  CHECK_THROWS_AS(asymmetry_percent(60, -1), Error);

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> len(10, 90);
  for (int i = 0; i < 200; ++i) {
    const double l = len(rng), r = len(rng);
    CHECK(asymmetry_percent(l, r) == asymmetry_percent(r, l));
    CHECK(asymmetry_percent(3.5 * l, 3.5 * r) ==
          doctest::Approx(asymmetry_percent(l, r)).epsilon(1e-12));
  }
}
