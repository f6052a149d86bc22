#pragma once

// File formats: per-sensor CSV logs, reference step lengths, ground truth,
// the subject profile (`key = value` lines), and the JSON report.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gait/calibrate.hpp"
#include "gait/core.hpp"
#include "gait/feedback.hpp"
#include "gait/orientation.hpp"
#include "gait/pipeline.hpp"
#include "gait/signal.hpp"
#include "gait/synth.hpp"

namespace gait {

inline constexpr std::string_view kImuHeader = "t,ax,ay,az,gx,gy,gz";
inline constexpr std::string_view kBendHeader = "t,angle_deg";
inline constexpr std::string_view kReferenceHeader = "step_index,side,length_cm";
inline constexpr std::string_view kTruthHeader =
    "step_index,side,length_cm,alpha_f,beta_f,alpha_b,beta_b,t_front,t_back";

/// Fixed decimal text with six fractional digits.
std::string format_decimal(double v);
/// Strict decimal parse of a whole field; nullopt on junk.
std::optional<double> parse_decimal(std::string_view field);

struct ParseReport {
  std::size_t rows = 0;
  std::size_t dropped_nonfinite = 0;
  std::size_t rejected_range = 0;
  std::vector<std::string> messages;
};

/// Readers throw InvalidInput (with file:line) on a wrong header or a
/// malformed row. Rows with non-finite values are dropped and counted;
/// readings outside the sensor range are rejected with a diagnostic.
std::vector<ImuSample> read_imu_csv(const std::filesystem::path& path,
                                    ParseReport* report = nullptr);
std::vector<BendSample> read_bend_csv(const std::filesystem::path& path,
                                      ParseReport* report = nullptr);
std::vector<ReferenceStep> read_reference_csv(const std::filesystem::path& path);
std::vector<TruthStep> read_truth_csv(const std::filesystem::path& path);

/// Text forms, used by the writers and the stdin stream reader.
std::vector<ImuSample> parse_imu_csv(std::string_view text,
                                     const std::string& source,
                                     ParseReport* report = nullptr);
std::vector<BendSample> parse_bend_csv(std::string_view text,
                                       const std::string& source,
                                       ParseReport* report = nullptr);
std::string format_imu_csv(const std::vector<ImuSample>& samples);
std::string format_bend_csv(const std::vector<BendSample>& samples);
std::string format_reference_csv(const std::vector<ReferenceStep>& refs);
std::string format_truth_csv(const std::vector<TruthStep>& steps);

void write_text(const std::filesystem::path& path, const std::string& text);

struct TrialFiles {
  std::filesystem::path imu[2];
  std::filesystem::path bend[2];
  std::filesystem::path reference;
  std::filesystem::path truth;
};

/// `<dir>/<trial>_<L|R>_imu.csv`, `_bend.csv`, `<trial>_ref.csv`,
/// `<trial>_truth.csv`.
TrialFiles trial_files(const std::filesystem::path& dir,
                       const std::string& trial);

struct LoadedTrial {
  TrialStreams streams;
  std::optional<std::vector<ReferenceStep>> references;
  ParseReport report;
};

LoadedTrial load_trial(const TrialFiles& files);
void save_trial(const TrialFiles& files, const RawTrial& raw,
                const GroundTruth& truth);

struct SubjectProfile {
  StaticParams nominal;
  std::optional<StaticParams> fitted;
  std::optional<AngleBias> bias;
  double madgwick_beta = kDefaultMadgwickBeta;
  std::size_t downsample_imu = kImuDownsample;
  std::size_t downsample_bend = kBendDownsample;
  double refractory_s = 0.3;
  double prominence_deg = 1.0;
  double asym_threshold_pct = kDefaultAsymmetryThresholdPct;
  double rls_lambda = kDefaultRlsLambda;
  double rls_p0 = kDefaultRlsP0;
  Mounting mounting = Mounting::ZUpXForward;

  /// Lengths used for analysis: fitted when present, else nominal.
  const StaticParams& active_params() const noexcept {
    return fitted ? *fitted : nominal;
  }
  PipelineConfig pipeline_config() const;
  /// Throws InvalidInput for values out of range or a fitted set outside
  /// the calibration box around nominal.
  void validate() const;
};

SubjectProfile parse_profile(std::string_view text, const std::string& source);
SubjectProfile read_profile(const std::filesystem::path& path);
std::string format_profile(const SubjectProfile& p);

struct ErrorStats {
  std::size_t n = 0;
  double mape_pct = 0.0;
  double rmse = 0.0;
};

struct Metrics {
  ErrorStats step;       ///< cm
  ErrorStats stride;     ///< cm
  ErrorStats velocity;   ///< m/s
  double total_distance_pct = 0.0;
  double total_estimated_cm = 0.0;
  double total_reference_cm = 0.0;
  std::size_t unmatched_steps = 0;
};

/// Steps are matched to references by index and side.
Metrics compute_metrics(const std::vector<StepMeasurement>& steps,
                        const std::vector<Stride>& strides,
                        const std::vector<ReferenceStep>& refs);
ErrorStats error_stats(const std::vector<double>& estimate,
                       const std::vector<double>& reference);

nlohmann::json to_json(const StepMeasurement& s);
nlohmann::json to_json(const Stride& s);
nlohmann::json to_json(const FeedbackEvent& e);
nlohmann::json to_json(const Metrics& m);

struct ReportContext {
  std::string trial;
  StaticParams params;
  std::string params_source;  ///< "nominal" or "fitted"
  std::optional<AngleBias> bias;
  std::optional<Metrics> metrics;
};

nlohmann::json make_report(const AnalysisResult& result,
                           const ReportContext& context);

}  // namespace gait
