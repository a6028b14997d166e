#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "qtele/rng.hpp"

namespace qtele {

struct TimeTag {
  std::uint8_t channel = 0;
  std::int64_t t_ps = 0;

  friend bool operator==(const TimeTag&, const TimeTag&) = default;
};

// Merged-stream order: time, then channel.
inline bool tag_before(const TimeTag& a, const TimeTag& b) {
  return a.t_ps < b.t_ps || (a.t_ps == b.t_ps && a.channel < b.channel);
}

struct DetectorConfig {
  double efficiency = 1.0;
  double jitter_sigma_ps = 0.0;
  double dead_time_ps = 0.0;
  double dark_rate = 0.0;  // counts/s

  void validate(const char* field_prefix = "detector") const;
};

// Photon arrival times (sorted) to detector tags on `channel`: efficiency
// thinning, Gaussian jitter, dark counts over [0, duration), then dead time.
// Tags are clamped to t >= 0.
std::vector<TimeTag> detect(std::span<const std::int64_t> photon_times_ps, const DetectorConfig& cfg,
                            std::uint8_t channel, double duration_s, Rng& rng);

// A group counts when one tag from each channel lies within a span
// (max - min) of at most width_ps. The same rule applies to every fold.
struct CoincidenceWindow {
  std::int64_t width_ps = 64;
  std::vector<std::uint8_t> channels;

  std::size_t fold() const { return channels.size(); }
  void validate() const;
};

inline constexpr std::size_t kMaxFold = 8;

// Streaming greedy coincidence counter over a merged, time-ordered tag stream.
// On each arriving tag, expired pending tags (older than t - width) are dropped;
// if every other channel has a pending tag, the arriving tag closes a group with
// the earliest pending tag of each other channel, otherwise it becomes pending.
// Each tag joins at most one group. Results do not depend on how the stream is
// chunked across push() calls.
class CoincidenceCounter {
 public:
  explicit CoincidenceCounter(CoincidenceWindow window, bool keep_groups = true);

  // Throws UnsortedInputError if the stream goes backwards in time, including
  // across chunk boundaries.
  void push(std::span<const TimeTag> tags);
  void push(const TimeTag& tag);

  std::uint64_t count() const { return count_; }
  // Flattened groups, fold() tags each, in window channel order.
  const std::vector<TimeTag>& group_tags() const { return groups_; }
  const CoincidenceWindow& window() const { return window_; }

 private:
  struct Pending {
    std::vector<std::int64_t> t;
    std::size_t head = 0;

    bool empty() const { return head == t.size(); }
    void compact();
  };

  CoincidenceWindow window_;
  bool keep_groups_;
  std::array<int, 256> slot_{};
  std::vector<Pending> pending_;
  std::size_t nonempty_ = 0;
  std::int64_t last_t_;
  std::uint64_t count_ = 0;
  std::vector<TimeTag> groups_;
};

struct CoincidenceResult {
  std::uint64_t count = 0;
  std::vector<TimeTag> group_tags;  // flattened, fold() per group
};

// Per-channel sorted streams; they are merged by (t, channel) before counting.
// Throws UnsortedInputError if any stream is not sorted.
CoincidenceResult count_coincidences(const std::vector<std::vector<TimeTag>>& streams, const CoincidenceWindow& window);

// Merge of per-channel sorted streams by (t, channel).
std::vector<TimeTag> merge_streams(const std::vector<std::vector<TimeTag>>& streams);

// Signal tags taking part in (ch1, ch2, ch3) triples, i.e. the heralded photons.
std::vector<TimeTag> threefold_herald_counts(const std::vector<TimeTag>& ch1, const std::vector<TimeTag>& ch2,
                                             const std::vector<TimeTag>& ch3, std::int64_t width_ps);

struct Visibility {
  double value = 0.0;
  double sigma = 0.0;
};

// V = (far - dip)/far with Poisson propagation.
// Throws UndefinedVisibilityError when far_counts is zero.
Visibility estimate_visibility(double dip_counts, double far_counts);

// Expected accidental rates for independent Poisson streams under the span rule.
double accidental_rate_twofold(double r1, double r2, double width_ps);
double accidental_rate_threefold(double r1, double r2, double r3, double width_ps);
// Correlated (ch1, ch2) pairs at rate r12 with an independent third stream.
double accidental_rate_pair_plus_single(double r12, double r3, double width_ps);

}  // namespace qtele
