#include "qtele/timetag.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "qtele/errors.hpp"

namespace qtele {

void DetectorConfig::validate(const char* field_prefix) const {
  const std::string p(field_prefix);
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw ConfigError(p + ".efficiency", "must lie in [0, 1]");
  if (!(jitter_sigma_ps >= 0.0)) throw ConfigError(p + ".jitter_sigma_ps", "must be non-negative");
  if (!(dead_time_ps >= 0.0)) throw ConfigError(p + ".dead_time_ps", "must be non-negative");
  if (!(dark_rate >= 0.0)) throw ConfigError(p + ".dark_rate", "must be non-negative");
}

std::vector<TimeTag> detect(std::span<const std::int64_t> photon_times_ps, const DetectorConfig& cfg,
                            std::uint8_t channel, double duration_s, Rng& rng) {
  std::vector<std::int64_t> t;
  t.reserve(static_cast<std::size_t>(photon_times_ps.size() * cfg.efficiency) + 16);
  std::bernoulli_distribution keep(cfg.efficiency);
  std::normal_distribution<double> jitter(0.0, cfg.jitter_sigma_ps);
  const bool jittered = cfg.jitter_sigma_ps > 0.0;
  std::int64_t prev = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t x : photon_times_ps) {
    if (x < prev) throw UnsortedInputError("photon events passed to detect() are not time-sorted");
    prev = x;
    if (cfg.efficiency < 1.0 && !keep(rng)) continue;
    const std::int64_t j = jittered ? x + static_cast<std::int64_t>(std::llround(jitter(rng))) : x;
    t.push_back(std::max<std::int64_t>(j, 0));
  }
  if (jittered) std::sort(t.begin(), t.end());

  if (cfg.dark_rate > 0.0 && duration_s > 0.0) {
    std::exponential_distribution<double> gap(cfg.dark_rate * 1e-12);
    const double end_ps = duration_s * 1e12;
    std::vector<std::int64_t> dark;
    for (double u = gap(rng); u < end_ps; u += gap(rng)) dark.push_back(static_cast<std::int64_t>(u));
    std::vector<std::int64_t> merged;
    merged.reserve(t.size() + dark.size());
    std::merge(t.begin(), t.end(), dark.begin(), dark.end(), std::back_inserter(merged));
    t.swap(merged);
  }

  std::vector<TimeTag> out;
  out.reserve(t.size());
  const double dead = cfg.dead_time_ps;
  std::int64_t last = std::numeric_limits<std::int64_t>::min();
  for (std::int64_t x : t) {
    if (dead > 0.0 && !out.empty() && static_cast<double>(x - last) < dead) continue;
    out.push_back({channel, x});
    last = x;
  }
  return out;
}

void CoincidenceWindow::validate() const {
  if (width_ps <= 0) throw ConfigError("window.width_ps", "must be positive");
  if (channels.size() < 2 || channels.size() > kMaxFold)
    throw ConfigError("window.channels", "needs between 2 and " + std::to_string(kMaxFold) + " channels");
  for (std::size_t i = 0; i < channels.size(); ++i)
    for (std::size_t j = i + 1; j < channels.size(); ++j)
      if (channels[i] == channels[j]) throw ConfigError("window.channels", "channels must be distinct");
}

void CoincidenceCounter::Pending::compact() {
  if (head > 64 && 2 * head > t.size()) {
    t.erase(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(head));
    head = 0;
  }
}

CoincidenceCounter::CoincidenceCounter(CoincidenceWindow window, bool keep_groups)
    : window_(std::move(window)), keep_groups_(keep_groups), last_t_(std::numeric_limits<std::int64_t>::min()) {
  window_.validate();
  slot_.fill(-1);
  for (std::size_t i = 0; i < window_.channels.size(); ++i) slot_[window_.channels[i]] = static_cast<int>(i);
  pending_.resize(window_.channels.size());
}

void CoincidenceCounter::push(const TimeTag& tag) {
  if (tag.t_ps < last_t_) throw UnsortedInputError("tag stream goes backwards in time at t=" + std::to_string(tag.t_ps));
  last_t_ = tag.t_ps;
  const int slot = slot_[tag.channel];
  if (slot < 0) return;

  const std::int64_t oldest = tag.t_ps - window_.width_ps;
  const std::size_t fold = pending_.size();
  for (Pending& p : pending_) {
    if (p.empty()) continue;
    while (!p.empty() && p.t[p.head] < oldest) ++p.head;
    if (p.empty()) {
      p.t.clear();
      p.head = 0;
      --nonempty_;
    } else {
      p.compact();
    }
  }

  Pending& mine = pending_[static_cast<std::size_t>(slot)];
  if (mine.empty() && nonempty_ == fold - 1) {
    ++count_;
    const std::size_t base = groups_.size();
    if (keep_groups_) groups_.resize(base + fold);
    for (std::size_t i = 0; i < fold; ++i) {
      if (static_cast<int>(i) == slot) {
        if (keep_groups_) groups_[base + i] = tag;
        continue;
      }
      Pending& p = pending_[i];
      if (keep_groups_) groups_[base + i] = {window_.channels[i], p.t[p.head]};
      ++p.head;
      if (p.empty()) {
        p.t.clear();
        p.head = 0;
        --nonempty_;
      } else {
        p.compact();
      }
    }
    return;
  }
  if (mine.empty()) ++nonempty_;
  mine.t.push_back(tag.t_ps);
}

void CoincidenceCounter::push(std::span<const TimeTag> tags) {
  for (const TimeTag& t : tags) push(t);
}

std::vector<TimeTag> merge_streams(const std::vector<std::vector<TimeTag>>& streams) {
  std::size_t total = 0;
  for (const auto& s : streams) {
    total += s.size();
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].t_ps < s[i - 1].t_ps) throw UnsortedInputError("tag stream is not time-sorted");
  }
  std::vector<TimeTag> out;
  out.reserve(total);
  if (streams.size() == 1) return streams[0];
  if (streams.size() == 2) {
    std::merge(streams[0].begin(), streams[0].end(), streams[1].begin(), streams[1].end(), std::back_inserter(out),
               tag_before);
    return out;
  }
  using Head = std::pair<TimeTag, std::size_t>;  // tag, stream index
  const auto later = [](const Head& a, const Head& b) { return tag_before(b.first, a.first); };
  std::priority_queue<Head, std::vector<Head>, decltype(later)> heap(later);
  std::vector<std::size_t> pos(streams.size(), 0);
  for (std::size_t i = 0; i < streams.size(); ++i)
    if (!streams[i].empty()) heap.push({streams[i][0], i});
  while (!heap.empty()) {
    const auto [tag, i] = heap.top();
    heap.pop();
    out.push_back(tag);
    if (++pos[i] < streams[i].size()) heap.push({streams[i][pos[i]], i});
  }
  return out;
}

CoincidenceResult count_coincidences(const std::vector<std::vector<TimeTag>>& streams, const CoincidenceWindow& window) {
  CoincidenceCounter counter(window);
  counter.push(merge_streams(streams));
  return {counter.count(), counter.group_tags()};
}

std::vector<TimeTag> threefold_herald_counts(const std::vector<TimeTag>& ch1, const std::vector<TimeTag>& ch2,
                                             const std::vector<TimeTag>& ch3, std::int64_t width_ps) {
  if (ch1.empty() || ch2.empty() || ch3.empty()) return {};
  const CoincidenceWindow w{width_ps, {ch1.front().channel, ch2.front().channel, ch3.front().channel}};
  const CoincidenceResult r = count_coincidences({ch1, ch2, ch3}, w);
  std::vector<TimeTag> out;
  out.reserve(r.count);
  for (std::size_t g = 0; g < r.count; ++g) out.push_back(r.group_tags[3 * g + 2]);
  std::sort(out.begin(), out.end(), tag_before);
  return out;
}

Visibility estimate_visibility(double dip_counts, double far_counts) {
  if (!(far_counts > 0.0)) throw UndefinedVisibilityError("far-from-dip counts are zero");
  const double v = (far_counts - dip_counts) / far_counts;
  const double sigma = std::sqrt(dip_counts / (far_counts * far_counts) +
                                 dip_counts * dip_counts / (far_counts * far_counts * far_counts));
  return {v, sigma};
}

double accidental_rate_twofold(double r1, double r2, double width_ps) { return 2.0 * r1 * r2 * width_ps * 1e-12; }

double accidental_rate_threefold(double r1, double r2, double r3, double width_ps) {
  const double w = width_ps * 1e-12;
  return 3.0 * r1 * r2 * r3 * w * w;
}

double accidental_rate_pair_plus_single(double r12, double r3, double width_ps) {
  return 2.0 * r12 * r3 * width_ps * 1e-12;
}

}  // namespace qtele
