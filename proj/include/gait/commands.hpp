#pragma once

// The work behind each CLI verb, kept out of the executable so tests can
// drive it directly.

#include <filesystem>
#include <functional>
#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gait/io.hpp"

namespace gait {

/// Batch calibration needs at least this many referenced steps, RLS fewer.
inline constexpr std::size_t kMinBatchReferences = 10;
inline constexpr std::size_t kMinRlsReferences = 5;

enum class CalibrationMode { Batch, Rls };
CalibrationMode parse_calibration_mode(std::string_view text);

/// Steps with a reference of the same index and side, in time order.
struct ReferencedSteps {
  std::vector<StepMeasurement> steps;  ///< raw angles (no bias applied)
  std::vector<ReferenceStep> refs;
};

ReferencedSteps referenced_steps(const std::vector<StepMeasurement>& steps,
                                 const std::vector<ReferenceStep>& refs);

/// MAPE of the step model with the given lengths and bias, percent.
double model_mape(std::span<const StepMeasurement> steps,
                  std::span<const ReferenceStep> refs,
                  const StaticParams& params, const AngleBias& bias = {});

struct CalibrationOutcome {
  SubjectProfile profile;  ///< input profile with fitted values filled in
  nlohmann::json summary;
};

/// Analyzes the trial with the nominal lengths and no bias, fits on the
/// leading 70% of referenced steps and reports MAPE on the remaining 30%.
/// Throws Calibration when there are too few referenced steps.
CalibrationOutcome calibrate_trial(const LoadedTrial& trial,
                                   const SubjectProfile& profile,
                                   CalibrationMode mode, bool fit_bias);

ReportContext report_context(const std::string& trial,
                             const SubjectProfile& profile);

/// Full batch report, with metrics when references are present.
nlohmann::json analyze_trial(const LoadedTrial& trial,
                             const SubjectProfile& profile,
                             const std::string& name);

using JsonSink = std::function<void(const nlohmann::json&)>;

/// Live records: one object per step, stride and feedback event.
void emit_update(const StepAccumulator::Update& u, const JsonSink& sink);

/// Feeds the four streams through StreamProcessor in timestamp order and
/// emits live records, then a summary holding the final report.
AnalysisResult replay_trial(const LoadedTrial& trial,
                            const SubjectProfile& profile,
                            const std::string& name, const JsonSink& sink);

/// Reads `source,<csv fields>` lines (source: L_imu, R_imu, L_bend,
/// R_bend) from a file descriptor, waiting at most `stall_timeout_s` for
/// each line. Throws InvalidInput when input stalls or a line is malformed.
AnalysisResult stream_fd(int fd, double stall_timeout_s,
                         const SubjectProfile& profile,
                         const std::string& name, const JsonSink& sink);

/// Trial names in `dir` that have a left IMU file, sorted.
std::vector<std::string> discover_trials(const std::filesystem::path& dir);

/// Per-trial held-out MAPE for nominal, batch LS and batch LS plus bias.
nlohmann::json eval_directory(const std::filesystem::path& dir,
                              const SubjectProfile& profile);

}  // namespace gait
