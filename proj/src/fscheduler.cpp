#include "evso/fscheduler.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evso/error.hpp"

namespace evso {
namespace {

void require_chunk(const DiffSeries& series, ChunkRange chunk) {
  if (chunk.end > series.frame_count() || chunk.start >= chunk.end) {
    throw Error(ErrorCode::InvalidArgument, "chunk [" + std::to_string(chunk.start) + "," +
                                                std::to_string(chunk.end) + ") outside the series");
  }
  if (chunk.length() < 2) throw Error(ErrorCode::ChunkTooSmall, "chunk has no internal frame pair");
}

}  // namespace

void SplitConfig::validate() const {
  if (!(alpha > 0.0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
  if (k_window < 2) throw Error(ErrorCode::InvalidArgument, "k_window must be at least 2");
}

std::string_view profile_key(ProfileId id) noexcept {
  switch (id) {
    case ProfileId::Evso: return "evso";
    case ProfileId::EvsoPlus: return "evso_plus";
    case ProfileId::EvsoPlusPlus: return "evso_plus_plus";
  }
  return "evso";
}

ProfileId parse_profile(std::string_view key) {
  for (auto id : kAllProfiles) {
    if (profile_key(id) == key) return id;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown profile '" + std::string(key) + "'");
}

void RateProfile::validate() const {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0) || s[i] > 1.0) {
      throw Error(ErrorCode::InvalidArgument, "scaling factors must lie in (0, 1]");
    }
    if (i > 0 && s[i - 1] > s[i]) throw Error(ErrorCode::InvalidArgument, "scaling factors must be nondecreasing");
  }
}

void ScheduleConfig::validate() const {
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (!(tau[i - 1] < tau[i])) throw Error(ErrorCode::InvalidArgument, "tau thresholds must strictly increase");
  }
  if (!(delta >= 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be non-negative");
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    if (profiles[i].id != static_cast<ProfileId>(i)) {
      throw Error(ErrorCode::InvalidArgument, "profiles must be ordered evso, evso_plus, evso_plus_plus");
    }
    profiles[i].validate();
  }
}

ChunkPlan RateSchedule::plan() const {
  ChunkPlan out;
  out.fps = fps;
  for (const auto& c : chunks) out.chunks.push_back(c.range);
  return out;
}

WindowStats rolling_stats(const DiffSeries& series, std::size_t n, int k_window, WindowMean mean_mode) {
  if (k_window < 2) throw Error(ErrorCode::InvalidArgument, "k_window must be at least 2");
  const auto k = static_cast<std::size_t>(k_window);
  if (n < k || n > series.pairs.size()) {
    throw Error(ErrorCode::WindowOutOfRange, "no full window at frame " + std::to_string(n));
  }
  // Pairs n-K+1 .. n-1, i.e. K-1 values.
  const std::size_t first = n - k + 1;
  double sum = 0.0;
  for (std::size_t i = first; i < n; ++i) sum += static_cast<double>(series.pairs[i].m_diff);
  const double divisor = mean_mode == WindowMean::DivideByK ? static_cast<double>(k) : static_cast<double>(k - 1);
  const double mean = sum / divisor;
  double sq = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double d = static_cast<double>(series.pairs[i].m_diff) - mean;
    sq += d * d;
  }
  return {mean, std::sqrt(sq / static_cast<double>(k - 1))};
}

bool est(const DiffSeries& series, std::size_t n, const SplitConfig& config, std::size_t frames_in_chunk) {
  const auto stats = rolling_stats(series, n, config.k_window, config.window_mean);
  const auto entering = static_cast<double>(series.pairs[n - 1].m_diff);
  const bool changed = stats.sigma > config.alpha || entering > config.beta;
  return changed && static_cast<double>(frames_in_chunk) > series.fps.value();
}

ChunkPlan split(const DiffSeries& series, const SplitConfig& config) {
  config.validate();
  if (series.pairs.empty()) throw Error(ErrorCode::TooFewFrames, "need at least 2 frames to split");
  ChunkPlan plan;
  plan.fps = series.fps;
  const std::size_t frames = series.frame_count();
  std::size_t start = 0;
  for (std::size_t n = static_cast<std::size_t>(config.k_window); n < frames; ++n) {
    if (est(series, n, config, n - start)) {
      plan.chunks.push_back({start, n});
      start = n;
    }
  }
  plan.chunks.push_back({start, frames});
  return plan;
}

double epf(double pair_m_diff, const RateProfile& profile, double gamma, const ScheduleConfig& config) {
  std::size_t bracket = 0;
  while (bracket < config.tau.size() && pair_m_diff >= config.tau[bracket]) ++bracket;
  return profile.s[bracket] * gamma;
}

double chunk_sigma(const DiffSeries& series, ChunkRange chunk) {
  require_chunk(series, chunk);
  const std::size_t first = chunk.start;
  const std::size_t last = chunk.end - 1;  // exclusive pair bound
  const auto count = static_cast<double>(last - first);
  if (last - first < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) sum += static_cast<double>(series.pairs[i].m_diff);
  const double mean = sum / count;
  double sq = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    const double d = static_cast<double>(series.pairs[i].m_diff) - mean;
    sq += d * d;
  }
  return std::sqrt(sq / (count - 1.0));
}

double evf(const DiffSeries& series, ChunkRange chunk, const RateProfile& profile, double gamma,
           const ScheduleConfig& config) {
  require_chunk(series, chunk);
  double sum = 0.0;
  for (std::size_t i = chunk.start; i + 1 < chunk.end; ++i) {
    sum += epf(static_cast<double>(series.pairs[i].m_diff), profile, gamma, config);
  }
  const double mean = sum / static_cast<double>(chunk.length() - 1);
  const double rate = mean + config.delta * chunk_sigma(series, chunk);
  return std::min(rate, gamma);
}

RateSchedule schedule_plan(const DiffSeries& series, const ChunkPlan& plan, const ScheduleConfig& config) {
  config.validate();
  if (plan.frame_count() != series.frame_count()) {
    throw Error(ErrorCode::ScheduleMismatch, "plan covers " + std::to_string(plan.frame_count()) +
                                                 " frames, series has " + std::to_string(series.frame_count()));
  }
  const double gamma = series.fps.value();
  RateSchedule out;
  out.fps = series.fps;
  for (const auto& chunk : plan.chunks) {
    ChunkRange rated = chunk;
    if (chunk.length() == 1) {
      if (chunk.start == 0) throw Error(ErrorCode::ChunkTooSmall, "single-frame series cannot be scheduled");
      rated.start = chunk.start - 1;
    }
    ScheduledChunk sc;
    sc.range = chunk;
    sc.sigma = chunk_sigma(series, rated);
    for (auto id : kAllProfiles) {
      sc.rates[static_cast<std::size_t>(id)] = evf(series, rated, config.profile(id), gamma, config);
    }
    out.chunks.push_back(sc);
  }
  return out;
}

RateSchedule schedule(const DiffSeries& series, const SplitConfig& split_config,
                      const ScheduleConfig& schedule_config) {
  return schedule_plan(series, split(series, split_config), schedule_config);
}

}  // namespace evso
