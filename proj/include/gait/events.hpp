#pragma once

// Gait-cycle segmentation. Minima of the knee and hip angle traces mark the
// key events: a knee minimum makes that leg the front limb (initial
// contact); the next hip minimum of the other leg closes the step (foot-off
// of the back limb).

#include <array>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gait/core.hpp"
#include "gait/signal.hpp"

namespace gait {

enum class Joint { Knee = 0, Hip = 1 };

struct SeriesId {
  Side side = Side::Left;
  Joint joint = Joint::Knee;

  bool operator==(const SeriesId&) const = default;
};

/// Channel order used wherever the four traces travel together:
/// knee L, knee R, hip L, hip R.
constexpr std::size_t channel_of(SeriesId id) noexcept {
  return static_cast<std::size_t>(id.joint) * 2 + index_of(id.side);
}
constexpr SeriesId series_of(std::size_t channel) noexcept {
  return {channel % 2 == 0 ? Side::Left : Side::Right,
          channel < 2 ? Joint::Knee : Joint::Hip};
}
std::string to_string(SeriesId id);

/// Four synchronized angle traces in degrees.
struct AngleQuad {
  std::array<UniformSeries, 2> knee;
  std::array<UniformSeries, 2> hip;

  const UniformSeries& series(SeriesId id) const noexcept {
    return id.joint == Joint::Knee ? knee[index_of(id.side)]
                                   : hip[index_of(id.side)];
  }
  UniformSeries& series(SeriesId id) noexcept {
    return id.joint == Joint::Knee ? knee[index_of(id.side)]
                                   : hip[index_of(id.side)];
  }
  std::size_t size() const noexcept { return knee[0].size(); }
  double rate() const noexcept { return knee[0].rate; }
  double time(std::size_t k) const noexcept { return knee[0].time(k); }

  /// Throws InvalidInput unless all four share rate, start and length.
  void validate() const;
};

struct DerivativeSeries {
  UniformSeries values;
  /// The first and last two entries use one-sided differences.
  static constexpr std::size_t kApproximateEdge = 2;

  bool approximate(std::size_t k) const noexcept {
    return k < kApproximateEdge || k + kApproximateEdge >= values.size();
  }
};

/// Five-point central difference; throws InvalidInput below five samples.
DerivativeSeries five_point_derivative(const UniformSeries& series);

struct MinimumEvent {
  SeriesId series;
  std::size_t index = 0;
  double t = 0.0;
  double value = 0.0;
};

struct MinimaConfig {
  double refractory_s = 0.3;
  double prominence_deg = 1.0;
  /// A candidate that has not risen by the prominence within this long is
  /// dropped.
  double max_wait_s = 2.0;
};

/// Causal minimum detector over (value, derivative) pairs fed in index
/// order. A candidate is marked where the derivative goes from <= 0 to > 0
/// (at whichever of the two samples is lower), at least `refractory_s`
/// after the previous accepted minimum and at least `prominence_deg` below
/// the highest value seen since then. The lowest candidate of a valley is
/// accepted once the series climbs `prominence_deg` above it, so an event
/// is reported some samples after its index.
class MinimumDetector {
 public:
  MinimumDetector(SeriesId id, const MinimaConfig& config);

  std::optional<MinimumEvent> push(std::size_t index, double t, double value,
                                   double derivative);
  /// Index of the candidate awaiting its rise, if any. No later event can
  /// have a smaller index.
  std::optional<std::size_t> pending_index() const noexcept;

 private:
  struct Sample {
    std::size_t index;
    double t;
    double value;
    double derivative;
  };

  SeriesId id_;
  MinimaConfig config_;
  std::optional<Sample> prev_;
  std::optional<Sample> candidate_;
  std::optional<double> last_accepted_t_;
  double running_max_ = -std::numeric_limits<double>::infinity();
};

/// Minima over the interior samples of a whole series (the first and last
/// two samples have no central derivative and never produce events).
std::vector<MinimumEvent> detect_minima(const UniformSeries& series,
                                        double refractory_s,
                                        double prominence_deg,
                                        SeriesId id = {});

struct SegmenterConfig {
  MinimaConfig minima;
  double timeout_s = 2.0;
  /// A back-limb hip minimum may precede the front knee minimum by this
  /// much: both sit in shallow valleys a short double support apart, and
  /// sensor noise moves either one by a few samples at 25 Hz.
  double back_lead_s = 0.25;
};

struct SegmentationDiagnostics {
  std::size_t discarded_steps = 0;
  std::size_t ignored_minima = 0;
  std::vector<std::string> messages;
};

/// Single-owner state machine turning the four traces into steps. Feed
/// interior samples j (those with a central derivative) in order; steps come
/// out with their angles and event times set and length zero.
class StepSegmenter {
 public:
  explicit StepSegmenter(const SegmenterConfig& config = {});

  void push(std::size_t j, double t, const std::array<double, 4>& values,
            const std::array<double, 4>& derivatives);
  /// Releases held events and drops a step still waiting for its back limb.
  void finish();

  /// Steps completed since the last call.
  std::vector<StepMeasurement> take_steps();
  const SegmentationDiagnostics& diagnostics() const noexcept { return diag_; }
  std::size_t emitted() const noexcept { return next_index_; }

 private:
  enum class Phase { AwaitFrontKneeMin, AwaitBackHipMin };

  struct HistoryEntry {
    std::size_t j;
    double t;
    std::array<double, 4> values;
  };

  struct PendingFront {
    Side side;
    double t;
    double alpha_f;
    double beta_f;
  };

  struct RecentHipMin {
    double t;
    double alpha;
    double knee;
  };

  const HistoryEntry& at(std::size_t j) const;
  void release(std::optional<std::size_t> horizon);
  void handle(const MinimumEvent& e);
  void check_timeout(double now);
  void complete(Side back, double t, double alpha_b, double knee);

  SegmenterConfig config_;
  std::array<MinimumDetector, 4> detectors_;
  std::deque<HistoryEntry> history_;
  std::vector<MinimumEvent> held_;
  Phase phase_ = Phase::AwaitFrontKneeMin;
  std::optional<Side> expected_front_;
  PendingFront pending_{};
  std::array<std::optional<RecentHipMin>, 2> recent_hip_;
  std::array<std::optional<double>, 2> last_foot_off_;
  std::vector<StepMeasurement> ready_;
  std::size_t next_index_ = 0;
  SegmentationDiagnostics diag_;
};

std::vector<StepMeasurement> segment_steps(
    const AngleQuad& quad, const SegmenterConfig& config = {},
    SegmentationDiagnostics* diagnostics = nullptr);

}  // namespace gait
