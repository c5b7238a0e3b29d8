#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "evso/fscheduler.hpp"
#include "evso/frame.hpp"

namespace evso {

/// Chunk-relative frames kept when resampling chunk_frames frames from gamma
/// to target_fps. With r = target/gamma, frame t is kept iff t == 0 or
/// floor(t*r) > floor((t-1)*r); the kept count is floor((n-1)*r) + 1.
std::vector<std::size_t> retime_chunk(std::size_t chunk_frames, double gamma, double target_fps);

struct ProcessedChunk {
  ChunkRange range;
  std::vector<std::size_t> kept;  ///< absolute source indices, increasing
  double target_fps = 0.0;
};

enum class Variant { Baseline, Evso, EvsoPlus, EvsoPlusPlus, TwoThirds };

/// "baseline", "evso", "evso_plus", "evso_plus_plus", "two_thirds".
std::string_view variant_key(Variant v) noexcept;
Variant variant_for(ProfileId id) noexcept;

struct ProcessedVideo {
  std::vector<ProcessedChunk> chunks;
  Variant variant = Variant::Baseline;
  FrameRate fps;

  std::size_t kept_count() const noexcept;
  std::size_t source_frame_count() const noexcept { return chunks.empty() ? 0 : chunks.back().range.end; }
};

ProcessedVideo process(const FrameSequence& sequence, const RateSchedule& schedule, ProfileId profile);

/// Every frame kept, chunked like plan. Used for the unprocessed manifest level.
ProcessedVideo process_unmodified(const FrameSequence& sequence, const ChunkPlan& plan);

/// Naive comparison: the whole video resampled to 2/3 of its rate as one chunk.
ProcessedVideo decimate_two_thirds(const FrameSequence& sequence);

enum class OutputMode {
  PerChunk,  ///< one stream per chunk holding only kept frames at the chunk rate
  Hold,      ///< one stream at the source rate, dropped frames repeat the last kept
};

/// Kept frames of one chunk as a sequence at the chunk's target rate.
FrameSequence chunk_sequence(const ProcessedVideo& processed, const FrameSequence& source, std::size_t chunk);
/// Source-length reconstruction with held frames.
FrameSequence hold_sequence(const ProcessedVideo& processed, const FrameSequence& source);

/// Y4M bytes: one entry per chunk for PerChunk, a single entry for Hold.
std::vector<std::string> write_y4m(const ProcessedVideo& processed, const FrameSequence& source, OutputMode mode);

/// Total kept frames over the source duration.
double avg_frame_rate(const ProcessedVideo& processed);

struct QualityReport {
  std::vector<double> per_frame_ssim;
  double mean_ssim_pct = 0.0;
};

QualityReport quality_report(const FrameSequence& original, const FrameSequence& hold);

}  // namespace evso
