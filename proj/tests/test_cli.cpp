#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kBin = GAITKIT_BIN;

fs::path workdir() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "gaitkit_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Runs `gaitkit <args>` through the shell; `prefix` may start a pipeline.
Run gaitkit(const std::string& args, const std::string& prefix = {}) {
  const fs::path out = workdir() / "stdout.txt";
  const fs::path err = workdir() / "stderr.txt";
  const std::string cmd = prefix + "'" + kBin.string() + "' " + args + " >'" +
                          out.string() + "' 2>'" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string dir_arg() { return "-d '" + workdir().string() + "'"; }

void synth(const std::string& trial, const std::string& extra) {
  const Run r = gaitkit("synth " + dir_arg() + " -t " + trial + " " + extra);
  REQUIRE_MESSAGE(r.code == 0, r.err);
}

std::string profile_path(const std::string& name) {
  return "'" + (workdir() / name).string() + "'";
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(gaitkit("--help").code == 0);
  CHECK(gaitkit("analyze --help").code == 0);
  CHECK(gaitkit("").code == 1);
  CHECK(gaitkit("analyze --no-such-flag").code == 1);
  CHECK(gaitkit("frobnicate").code == 1);
  CHECK(gaitkit("calibrate " + dir_arg() + " -t x -p y -m sideways").code == 1);
}

TEST_CASE("missing or malformed input exits 1 with a located message") {
  const Run missing = gaitkit("analyze " + dir_arg() + " -t nothing -p " +
                              profile_path("none.profile"));
  CHECK(missing.code == 1);
  CHECK(missing.err.find("none.profile") != std::string::npos);

  // Own directory, so the damaged trial stays out of the eval run below.
  const fs::path dir = workdir() / "broken";
  fs::create_directories(dir);
  const std::string d = "-d '" + dir.string() + "'";
  std::ofstream(workdir() / "bad.profile") << "l1_cm = 30\nl2_cm = 45\nd5_cm = 14\nfoo = 1\n";
  REQUIRE(gaitkit("synth " + d + " -t plain --steps 20 --profile-out " +
                  profile_path("plain.profile")).code == 0);
  const Run bad = gaitkit("analyze " + d + " -t plain -p " + profile_path("bad.profile"));
  CHECK(bad.code == 1);
  CHECK(bad.err.find("bad.profile:4") != std::string::npos);

  std::ofstream(dir / "plain_L_bend.csv") << "t,angle\n0,1\n";
  const Run header = gaitkit("analyze " + d + " -t plain -p " +
                             profile_path("plain.profile"));
  CHECK(header.code == 1);
  CHECK(header.err.find("plain_L_bend.csv:1") != std::string::npos);
}

TEST_CASE("synth, analyze and stream agree") {
  synth("walk", "--steps 60 --step-length 62 --seed 4 --profile-out " +
                    profile_path("walk.profile"));
  for (const char* f : {"walk_L_imu.csv", "walk_R_imu.csv", "walk_L_bend.csv",
                        "walk_R_bend.csv", "walk_ref.csv", "walk_truth.csv"}) {
    CHECK(fs::exists(workdir() / f));
  }
  const Run a = gaitkit("analyze " + dir_arg() + " -t walk -p " + profile_path("walk.profile"));
  REQUIRE_MESSAGE(a.code == 0, a.err);
  const json report = json::parse(a.out);
  CHECK(report.at("steps").size() == 60);
  CHECK(report.at("metrics").at("step_length").at("mape_pct").get<double>() < 1.0);

  const Run s = gaitkit("stream " + dir_arg() + " -t walk -p " + profile_path("walk.profile"));
  REQUIRE_MESSAGE(s.code == 0, s.err);
  std::istringstream lines(s.out);
  std::string line;
  std::size_t steps = 0;
  json summary;
  while (std::getline(lines, line)) {
    const json j = json::parse(line);
    if (j.at("type") == "step") ++steps;
    if (j.at("type") == "summary") summary = j.at("report");
  }
  CHECK(steps == 60);
  CHECK(summary == report);
}

TEST_CASE("report without references has empty metrics") {
  synth("noref", "--steps 20 --profile-out " + profile_path("noref.profile"));
  fs::remove(workdir() / "noref_ref.csv");
  const Run a = gaitkit("analyze " + dir_arg() + " -t noref -p " + profile_path("noref.profile"));
  REQUIRE_MESSAGE(a.code == 0, a.err);
  const json report = json::parse(a.out);
  CHECK(report.at("metrics") == json::object());
  const Run c = gaitkit("calibrate " + dir_arg() + " -t noref -p " +
                        profile_path("noref.profile"));
  CHECK(c.code == 1);
  CHECK(c.err.find("noref_ref.csv") != std::string::npos);
}

TEST_CASE("too few references is a calibration failure") {
  synth("short", "--steps 8 --profile-out " + profile_path("short.profile"));
  const Run batch = gaitkit("calibrate " + dir_arg() + " -t short -p " +
                            profile_path("short.profile"));
  CHECK(batch.code == 2);
  CHECK(batch.err.find("10") != std::string::npos);
  CHECK(gaitkit("calibrate " + dir_arg() + " -t short -m rls -p " +
                profile_path("short.profile"))
            .code == 0);
}

TEST_CASE("batch calibration improves held-out error and writes a profile") {
  synth("cal", "--steps 80 --beta-f 20 --beta-b 32 --spread 3 --angle-noise 0.5 "
               "--seed 9 --profile-out " + profile_path("cal.profile") +
               " --perturb-pct 8");
  const Run c = gaitkit("calibrate " + dir_arg() + " -t cal -p " + profile_path("cal.profile") +
                        " -o " + profile_path("cal_fitted.profile"));
  REQUIRE_MESSAGE(c.code == 0, c.err);
  const json summary = json::parse(c.out);
  const json& mape = summary.at("test_mape_pct");
  CHECK(mape.at("fitted").get<double>() < mape.at("nominal").get<double>());
  const std::string fitted = slurp(workdir() / "cal_fitted.profile");
  CHECK(fitted.find("fitted_l1_cm") != std::string::npos);

  const Run a = gaitkit("analyze " + dir_arg() + " -t cal -p " +
                        profile_path("cal_fitted.profile"));
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out).at("calibration").at("source") == "fitted");

  const Run e = gaitkit("eval " + dir_arg() + " -p " + profile_path("cal.profile"));
  REQUIRE_MESSAGE(e.code == 0, e.err);
  CHECK(json::parse(e.out).contains("trials"));
}

TEST_CASE("stdin stream: samples in, records out, stall fails") {
  synth("live", "--steps 16 --profile-out " + profile_path("live.profile"));
  // Interleave the four files as 'source,...' lines.
  const fs::path feed = workdir() / "live_feed.txt";
  {
    std::ofstream out(feed);
    for (const auto& [src, file] :
         {std::pair{"L_imu", "live_L_imu.csv"}, {"R_imu", "live_R_imu.csv"},
          {"L_bend", "live_L_bend.csv"}, {"R_bend", "live_R_bend.csv"}}) {
      std::istringstream rows(slurp(workdir() / file));
      std::string row;
      std::getline(rows, row);
      while (std::getline(rows, row)) out << src << ',' << row << '\n';
    }
  }
  const Run s = gaitkit("stream --stdin -p " + profile_path("live.profile") + " <'" +
                        feed.string() + "'");
  REQUIRE_MESSAGE(s.code == 0, s.err);
  CHECK(s.out.find("\"type\":\"step\"") != std::string::npos);

  const Run stall = gaitkit("stream --stdin --stall-timeout 0.3 -p " +
                                profile_path("live.profile"),
                            "(head -n 50 '" + feed.string() + "'; sleep 2) | ");
  CHECK(stall.code == 1);
  CHECK(stall.err.find("stalled") != std::string::npos);

  std::ofstream(workdir() / "junk.txt") << "X_imu,0,0,0,1,0,0,0\n";
  CHECK(gaitkit("stream --stdin -p " + profile_path("live.profile") + " <'" +
                (workdir() / "junk.txt").string() + "'")
            .code == 1);
}
