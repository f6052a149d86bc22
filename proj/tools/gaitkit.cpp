// gaitkit: command-line front end for calibration, analysis, streaming,
// synthetic trial generation and evaluation.

#include <unistd.h>

#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gait/commands.hpp"
#include "gait/error.hpp"

namespace {

using nlohmann::json;

void write_json(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty() || out == "-") {
    std::cout << text << std::flush;
  } else {
    gait::write_text(out, text);
  }
}

gait::TrialFiles files_for(const std::string& dir, const std::string& trial,
                           const std::string& ref) {
  gait::TrialFiles f = gait::trial_files(dir, trial);
  if (!ref.empty()) {
    f.reference = ref;
    if (!std::filesystem::exists(f.reference)) {
      gait::fail_input("reference file " + ref + " not found");
    }
  }
  return f;
}

gait::AngleBias parse_bias(const std::vector<double>& v) {
  if (v.empty()) return {};
  if (v.size() != 4) gait::fail_input("--bias takes four values");
  return {v[0], v[1], v[2], v[3]};
}

struct TrialArgs {
  std::string dir = ".";
  std::string trial;
  std::string profile;
  std::string ref;

  void add(CLI::App* cmd, bool need_profile = true) {
    cmd->add_option("-d,--dir", dir, "directory holding the trial files");
    cmd->add_option("-t,--trial", trial, "trial name (file prefix)")->required();
    auto* p = cmd->add_option("-p,--profile", profile, "subject profile");
    if (need_profile) p->required();
    cmd->add_option("--ref", ref, "reference CSV (default <trial>_ref.csv)");
  }
};

struct SynthArgs {
  std::string dir = ".";
  std::string trial = "synth";
  std::string profile_out;
  std::size_t steps = 200;
  double step_length = 60.0;
  double l1 = 30.0, l2 = 45.0, d5 = 14.0;
  double cadence = 1.8;
  double perturb_pct = 0.0;
  double bend_noise = 0.0, accel_noise = 0.0, gyro_noise = 0.0, jitter = 0.0;
  std::vector<double> bias;
  double beta_f = 10.0, beta_b = 15.0, spread = 0.0;
  std::size_t limp_from = 0;
  double asym_pct = 0.0;
  std::string short_side = "R";
  std::string mounting = "z_up_x_forward";
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
  gait::GaitProfile g;
  g.params = {a.l1, a.l2, a.d5};
  g.cadence = a.cadence;
  g.step_lengths =
      a.asym_pct > 0.0
          ? gait::limp_lengths(a.steps, a.step_length, g.first_side,
                               gait::parse_side(a.short_side), a.limp_from,
                               a.asym_pct)
          : gait::constant_lengths(a.steps, a.step_length);
  g.shape.beta_f = a.beta_f;
  g.shape.beta_b = a.beta_b;
  g.beta_f_spread = a.spread;
  g.beta_b_spread = a.spread;
  g.noise.bend_noise_deg = a.bend_noise;
  g.noise.accel_noise_g = a.accel_noise;
  g.noise.gyro_noise_dps = a.gyro_noise;
  g.noise.event_jitter_deg = a.jitter;
  g.noise.bias = parse_bias(a.bias);
  g.mounting = gait::parse_mounting(a.mounting);
  g.seed = a.seed;
  g.validate();

  const gait::SynthAngles angles = gait::synthesize_angles(g);
  const gait::RawTrial raw = gait::synthesize_raw(g, angles);
  gait::save_trial(gait::trial_files(a.dir, a.trial), raw, angles.truth);

  if (!a.profile_out.empty()) {
    gait::SubjectProfile p;
    // Alternating signs keep the perturbed lengths apart from a plain
    // rescaling of the truth.
    const double f = a.perturb_pct / 100.0;
    p.nominal = {a.l1 * (1.0 + f), a.l2 * (1.0 - f), a.d5 * (1.0 + f)};
    p.mounting = g.mounting;
    p.validate();
    gait::write_text(a.profile_out, gait::format_profile(p));
  }
  std::cout << "wrote " << angles.truth.steps.size() << " steps to "
            << (std::filesystem::path(a.dir) / a.trial).string() << "_*\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaitkit: step length and gait feedback from thigh IMUs and "
               "knee bend sensors"};
  app.require_subcommand(1);

  TrialArgs analyze_args;
  std::string analyze_out;
  auto* analyze = app.add_subcommand("analyze", "batch analysis, JSON report");
  analyze_args.add(analyze);
  analyze->add_option("-o,--out", analyze_out, "report path (default stdout)");

  TrialArgs cal_args;
  std::string cal_mode = "batch";
  std::string cal_out;
  std::string cal_summary;
  bool cal_bias = false;
  auto* calibrate = app.add_subcommand("calibrate", "fit static lengths");
  cal_args.add(calibrate);
  calibrate->add_option("-m,--mode", cal_mode, "batch or rls");
  calibrate->add_flag("--bias", cal_bias, "also fit event-angle biases (batch)");
  calibrate->add_option("-o,--out", cal_out,
                        "updated profile path (default: overwrite --profile)");
  calibrate->add_option("--summary", cal_summary, "summary JSON path (default stdout)");

  TrialArgs stream_args;
  bool stream_stdin = false;
  double stall_s = 5.0;
  auto* stream = app.add_subcommand("stream", "causal processing, one JSON object per line");
  stream->add_option("-d,--dir", stream_args.dir, "directory holding the trial files");
  stream->add_option("-t,--trial", stream_args.trial, "trial to replay");
  stream->add_option("-p,--profile", stream_args.profile, "subject profile")->required();
  stream->add_option("--ref", stream_args.ref, "reference CSV for summary metrics");
  stream->add_flag("--stdin", stream_stdin,
                   "read 'source,t,...' lines from stdin (source: L_imu, R_imu, "
                   "L_bend, R_bend)");
  stream->add_option("--stall-timeout", stall_s, "seconds without input before failing");

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "write a synthetic trial and its ground truth");
  synth->add_option("-d,--dir", sa.dir, "output directory");
  synth->add_option("-t,--trial", sa.trial, "trial name");
  synth->add_option("--steps", sa.steps, "number of steps");
  synth->add_option("--step-length", sa.step_length, "target step length, cm");
  synth->add_option("--l1", sa.l1, "true thigh length, cm");
  synth->add_option("--l2", sa.l2, "true lower leg length, cm");
  synth->add_option("--d5", sa.d5, "true thigh diameter, cm");
  synth->add_option("--cadence", sa.cadence, "steps per second");
  synth->add_option("--beta-f", sa.beta_f, "knee flexion at initial contact, deg");
  synth->add_option("--beta-b", sa.beta_b, "knee flexion at foot-off, deg");
  synth->add_option("--spread", sa.spread, "per-step spread of the knee angles, deg");
  synth->add_option("--bend-noise", sa.bend_noise, "bend sensor noise, deg");
  synth->add_option("--accel-noise", sa.accel_noise, "accelerometer noise, g");
  synth->add_option("--gyro-noise", sa.gyro_noise, "gyroscope noise, deg/s");
  synth->add_option("--angle-noise", sa.jitter, "per-step event angle noise, deg");
  synth->add_option("--bias", sa.bias, "event angle biases alpha_f beta_f alpha_b beta_b, deg")
      ->expected(4);
  synth->add_option("--limp-from", sa.limp_from, "first limping stride");
  synth->add_option("--asym-pct", sa.asym_pct, "limp asymmetry, percent");
  synth->add_option("--short-side", sa.short_side, "limping side, L or R");
  synth->add_option("--mounting", sa.mounting, "IMU mounting axis");
  synth->add_option("--seed", sa.seed, "random seed");
  synth->add_option("--profile-out", sa.profile_out, "also write a subject profile");
  synth->add_option("--perturb-pct", sa.perturb_pct,
                    "profile nominal lengths off the truth by this percentage");

  std::string eval_dir;
  std::string eval_profile;
  std::string eval_out;
  auto* eval = app.add_subcommand("eval", "held-out metrics over a directory of trials");
  eval->add_option("-d,--dir", eval_dir, "trial directory")->required();
  eval->add_option("-p,--profile", eval_profile, "subject profile")->required();
  eval->add_option("-o,--out", eval_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*analyze) {
      const auto profile = gait::read_profile(analyze_args.profile);
      const auto trial = gait::load_trial(
          files_for(analyze_args.dir, analyze_args.trial, analyze_args.ref));
      write_json(gait::analyze_trial(trial, profile, analyze_args.trial), analyze_out);
    } else if (*calibrate) {
      const auto profile = gait::read_profile(cal_args.profile);
      const auto mode = gait::parse_calibration_mode(cal_mode);
      const auto files = files_for(cal_args.dir, cal_args.trial, cal_args.ref);
      const auto trial = gait::load_trial(files);
      if (!trial.references) {
        throw gait::Error(gait::ErrorKind::InvalidInput,
                          "calibration needs references: " + files.reference.string() +
                              " not found");
      }
      const auto outcome = gait::calibrate_trial(trial, profile, mode, cal_bias);
      gait::write_text(cal_out.empty() ? cal_args.profile : cal_out,
                       gait::format_profile(outcome.profile));
      write_json(outcome.summary, cal_summary);
    } else if (*stream) {
      const auto profile = gait::read_profile(stream_args.profile);
      const gait::JsonSink sink = [](const json& j) {
        std::cout << j.dump() << '\n' << std::flush;
      };
      if (stream_stdin) {
        gait::stream_fd(STDIN_FILENO, stall_s, profile,
                        stream_args.trial.empty() ? "stdin" : stream_args.trial, sink);
      } else {
        if (stream_args.trial.empty()) {
          gait::fail_input("stream needs --trial or --stdin");
        }
        const auto trial = gait::load_trial(
            files_for(stream_args.dir, stream_args.trial, stream_args.ref));
        gait::replay_trial(trial, profile, stream_args.trial, sink);
      }
    } else if (*synth) {
      return run_synth(sa);
    } else if (*eval) {
      write_json(gait::eval_directory(eval_dir, gait::read_profile(eval_profile)),
                 eval_out);
    }
  } catch (const gait::Error& e) {
    std::cerr << "gaitkit: " << e.what() << '\n';
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "gaitkit: internal error: " << e.what() << '\n';
    return static_cast<int>(gait::ErrorKind::Invariant);
  }
  return 0;
}
