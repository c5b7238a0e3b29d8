#pragma once

#include <array>
#include <cstddef>
#include <string_view>
#include <vector>

#include "evso/frame.hpp"
#include "evso/similarity.hpp"

namespace evso {

/// Normaliser of the rolling-window mean. The window holds K-1 pair diffs;
/// the published formula divides their sum by K, which is the default here.
enum class WindowMean {
  DivideByK,
  DivideByKMinusOne,
};

struct SplitConfig {
  double alpha = 3000.0;  ///< rolling sigma threshold
  double beta = 15000.0;  ///< single-pair scene-change threshold
  int k_window = 10;
  WindowMean window_mean = WindowMean::DivideByK;

  void validate() const;
};

/// Half-open range of frame indices [start, end).
struct ChunkRange {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const noexcept { return end - start; }
  friend bool operator==(const ChunkRange&, const ChunkRange&) = default;
};

struct ChunkPlan {
  std::vector<ChunkRange> chunks;
  FrameRate fps;

  std::size_t frame_count() const noexcept { return chunks.empty() ? 0 : chunks.back().end; }
};

enum class ProfileId { Evso, EvsoPlus, EvsoPlusPlus };
inline constexpr std::array<ProfileId, 3> kAllProfiles = {ProfileId::Evso, ProfileId::EvsoPlus,
                                                          ProfileId::EvsoPlusPlus};

/// "evso", "evso_plus", "evso_plus_plus".
std::string_view profile_key(ProfileId id) noexcept;
ProfileId parse_profile(std::string_view key);

/// Frame-rate scaling factors for the five M-Diff brackets.
struct RateProfile {
  ProfileId id = ProfileId::Evso;
  std::array<double, 5> s{};

  void validate() const;

  static RateProfile evso() noexcept { return {ProfileId::Evso, {0.6, 0.83, 0.9, 0.93, 1.0}}; }
  static RateProfile evso_plus() noexcept { return {ProfileId::EvsoPlus, {0.5, 0.73, 0.83, 0.9, 1.0}}; }
  static RateProfile evso_plus_plus() noexcept {
    return {ProfileId::EvsoPlusPlus, {0.43, 0.6, 0.7, 0.8, 0.93}};
  }
};

struct ScheduleConfig {
  std::array<double, 4> tau{500.0, 1500.0, 3000.0, 6000.0};
  double delta = 0.0001;
  std::array<RateProfile, 3> profiles{RateProfile::evso(), RateProfile::evso_plus(), RateProfile::evso_plus_plus()};

  void validate() const;
  const RateProfile& profile(ProfileId id) const noexcept { return profiles[static_cast<std::size_t>(id)]; }
};

struct ScheduledChunk {
  ChunkRange range;
  double sigma = 0.0;
  std::array<double, 3> rates{};  ///< indexed by ProfileId

  double rate(ProfileId id) const noexcept { return rates[static_cast<std::size_t>(id)]; }
};

struct RateSchedule {
  std::vector<ScheduledChunk> chunks;
  FrameRate fps;

  std::size_t frame_count() const noexcept { return chunks.empty() ? 0 : chunks.back().range.end; }
  ChunkPlan plan() const;
};

struct WindowStats {
  double mean = 0.0;
  double sigma = 0.0;
};

/// Mean and deviation of the K-1 pair diffs ending at pair (n-1, n).
/// Requires k_window <= n <= frame_count - 1.
WindowStats rolling_stats(const DiffSeries& series, std::size_t n, int k_window,
                          WindowMean mean_mode = WindowMean::DivideByK);

/// Split decision at frame n with frames_in_chunk frames already in the
/// current chunk: (sigma_n > alpha or diff(n-1, n) > beta) and T > fps.
bool est(const DiffSeries& series, std::size_t n, const SplitConfig& config, std::size_t frames_in_chunk);

/// Partitions [0, frame_count). A triggered frame starts the next chunk.
ChunkPlan split(const DiffSeries& series, const SplitConfig& config = {});

/// Bracketed rate for one pair diff; each bracket includes its lower tau.
double epf(double pair_m_diff, const RateProfile& profile, double gamma, const ScheduleConfig& config = {});

/// Sample standard deviation of the pair diffs inside a chunk; 0 for one pair.
double chunk_sigma(const DiffSeries& series, ChunkRange chunk);

/// Mean epf over the chunk's pairs plus delta * chunk_sigma, clamped to gamma.
double evf(const DiffSeries& series, ChunkRange chunk, const RateProfile& profile, double gamma,
           const ScheduleConfig& config = {});

RateSchedule schedule(const DiffSeries& series, const SplitConfig& split_config = {},
                      const ScheduleConfig& schedule_config = {});

/// Rates for an existing plan. A one-frame chunk (possible only at the end)
/// is rated on the pair that enters it.
RateSchedule schedule_plan(const DiffSeries& series, const ChunkPlan& plan, const ScheduleConfig& config = {});

}  // namespace evso
