#include "evso/vprocessor.hpp"

#include <cmath>
#include <sstream>

#include "evso/error.hpp"
#include "evso/similarity.hpp"
#include "evso/y4m.hpp"

namespace evso {
namespace {

// Products like 100 * (12.9 / 30) land a hair below the integer they denote.
constexpr double kFloorSlack = 1e-9;

std::int64_t floor_step(std::size_t t, double ratio) {
  return static_cast<std::int64_t>(std::floor(static_cast<double>(t) * ratio + kFloorSlack));
}

ProcessedChunk retime(ChunkRange range, double gamma, double target) {
  ProcessedChunk chunk;
  chunk.range = range;
  chunk.target_fps = target;
  for (auto rel : retime_chunk(range.length(), gamma, target)) chunk.kept.push_back(range.start + rel);
  return chunk;
}

}  // namespace

std::vector<std::size_t> retime_chunk(std::size_t chunk_frames, double gamma, double target_fps) {
  if (!(gamma > 0.0) || !(target_fps > 0.0) || target_fps > gamma * (1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidRate, "target rate must lie in (0, gamma]");
  }
  const double ratio = std::min(target_fps / gamma, 1.0);
  std::vector<std::size_t> kept;
  for (std::size_t t = 0; t < chunk_frames; ++t) {
    if (t == 0 || floor_step(t, ratio) > floor_step(t - 1, ratio)) kept.push_back(t);
  }
  return kept;
}

std::string_view variant_key(Variant v) noexcept {
  switch (v) {
    case Variant::Baseline: return "baseline";
    case Variant::Evso: return "evso";
    case Variant::EvsoPlus: return "evso_plus";
    case Variant::EvsoPlusPlus: return "evso_plus_plus";
    case Variant::TwoThirds: return "two_thirds";
  }
  return "baseline";
}

Variant variant_for(ProfileId id) noexcept {
  switch (id) {
    case ProfileId::Evso: return Variant::Evso;
    case ProfileId::EvsoPlus: return Variant::EvsoPlus;
    case ProfileId::EvsoPlusPlus: return Variant::EvsoPlusPlus;
  }
  return Variant::Evso;
}

std::size_t ProcessedVideo::kept_count() const noexcept {
  std::size_t n = 0;
  for (const auto& c : chunks) n += c.kept.size();
  return n;
}

ProcessedVideo process(const FrameSequence& sequence, const RateSchedule& schedule, ProfileId profile) {
  if (schedule.frame_count() != sequence.size()) {
    throw Error(ErrorCode::ScheduleMismatch, "schedule covers " + std::to_string(schedule.frame_count()) +
                                                 " frames, sequence has " + std::to_string(sequence.size()));
  }
  ProcessedVideo out;
  out.variant = variant_for(profile);
  out.fps = sequence.fps();
  const double gamma = sequence.fps().value();
  for (const auto& c : schedule.chunks) out.chunks.push_back(retime(c.range, gamma, c.rate(profile)));
  return out;
}

ProcessedVideo process_unmodified(const FrameSequence& sequence, const ChunkPlan& plan) {
  if (plan.frame_count() != sequence.size()) {
    throw Error(ErrorCode::ScheduleMismatch, "plan does not cover the sequence");
  }
  ProcessedVideo out;
  out.variant = Variant::Baseline;
  out.fps = sequence.fps();
  const double gamma = sequence.fps().value();
  for (const auto& range : plan.chunks) out.chunks.push_back(retime(range, gamma, gamma));
  return out;
}

ProcessedVideo decimate_two_thirds(const FrameSequence& sequence) {
  if (sequence.empty()) throw Error(ErrorCode::TooFewFrames, "empty sequence");
  ProcessedVideo out;
  out.variant = Variant::TwoThirds;
  out.fps = sequence.fps();
  const double gamma = sequence.fps().value();
  out.chunks.push_back(retime({0, sequence.size()}, gamma, gamma * 2.0 / 3.0));
  return out;
}

FrameSequence chunk_sequence(const ProcessedVideo& processed, const FrameSequence& source, std::size_t chunk) {
  if (processed.source_frame_count() != source.size()) {
    throw Error(ErrorCode::ScheduleMismatch, "processed video does not match the source");
  }
  const auto& c = processed.chunks.at(chunk);
  std::vector<Frame> frames;
  frames.reserve(c.kept.size());
  for (auto idx : c.kept) frames.push_back(source[idx].with_index(frames.size()));
  return FrameSequence(source.dims(), FrameRate::from_double(c.target_fps), std::move(frames),
                       source.source_label());
}

FrameSequence hold_sequence(const ProcessedVideo& processed, const FrameSequence& source) {
  if (processed.source_frame_count() != source.size()) {
    throw Error(ErrorCode::ScheduleMismatch, "processed video does not match the source");
  }
  std::vector<Frame> frames;
  frames.reserve(source.size());
  for (const auto& c : processed.chunks) {
    auto next = c.kept.begin();
    std::size_t held = c.range.start;
    for (std::size_t t = c.range.start; t < c.range.end; ++t) {
      if (next != c.kept.end() && *next == t) {
        held = t;
        ++next;
      }
      frames.push_back(source[held].with_index(t));
    }
  }
  return FrameSequence(source.dims(), source.fps(), std::move(frames), source.source_label());
}

std::vector<std::string> write_y4m(const ProcessedVideo& processed, const FrameSequence& source, OutputMode mode) {
  std::vector<std::string> out;
  if (mode == OutputMode::Hold) {
    out.push_back(to_y4m_bytes(hold_sequence(processed, source)));
    return out;
  }
  for (std::size_t i = 0; i < processed.chunks.size(); ++i) {
    out.push_back(to_y4m_bytes(chunk_sequence(processed, source, i)));
  }
  return out;
}

double avg_frame_rate(const ProcessedVideo& processed) {
  const auto frames = processed.source_frame_count();
  if (frames == 0) throw Error(ErrorCode::TooFewFrames, "empty processed video");
  const double duration = static_cast<double>(frames) / processed.fps.value();
  return static_cast<double>(processed.kept_count()) / duration;
}

QualityReport quality_report(const FrameSequence& original, const FrameSequence& hold) {
  if (original.dims() != hold.dims()) throw Error(ErrorCode::DimsMismatch, "sequences differ in dimensions");
  if (original.size() != hold.size() || original.empty()) {
    throw Error(ErrorCode::ScheduleMismatch, "quality report needs equal, non-zero frame counts");
  }
  QualityReport report;
  report.per_frame_ssim.reserve(original.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < original.size(); ++t) {
    const double s = ssim(original[t], hold[t]);
    report.per_frame_ssim.push_back(s);
    sum += s;
  }
  report.mean_ssim_pct = 100.0 * sum / static_cast<double>(original.size());
  return report;
}

}  // namespace evso
