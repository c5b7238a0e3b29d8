#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "evso/config.hpp"
#include "evso/empd.hpp"
#include "evso/frame_source.hpp"
#include "evso/fscheduler.hpp"
#include "evso/similarity.hpp"
#include "evso/statistics.hpp"
#include "evso/vprocessor.hpp"

namespace evso {

// ---- input --------------------------------------------------------------

struct InputSpec {
  std::filesystem::path path;
  std::optional<FrameDims> dims;  ///< required for raw files
  std::optional<FrameRate> fps;   ///< required for raw files
  RawLayout layout = RawLayout::I420;
};

/// ".y4m" files are parsed as YUV4MPEG2, anything else as raw planar.
FrameSequence load_input(const InputSpec& spec);

// ---- serialized artifacts ----------------------------------------------

/// pair_index,m_diff,y_diff,ssim (ssim empty when absent).
std::string diff_series_csv(const DiffSeries& series);

/// {chunks: [{start, end, sigma}], gamma, frame_rate, config}
nlohmann::ordered_json plan_to_json(const DiffSeries& series, const ChunkPlan& plan, const PipelineConfig& config);
/// As plan_to_json with per-chunk rates {evso, evso_plus, evso_plus_plus}.
nlohmann::ordered_json schedule_to_json(const RateSchedule& schedule, const PipelineConfig& config);
RateSchedule schedule_from_json(const nlohmann::json& j);

struct VariantReport {
  Variant variant = Variant::Baseline;
  std::vector<std::size_t> kept_counts;
  double avg_fps = 0.0;
  double mean_ssim_pct = 0.0;
};

VariantReport report_variant(const ProcessedVideo& processed, const FrameSequence& source);
nlohmann::ordered_json to_json(const VariantReport& report);

// ---- pipeline -------------------------------------------------------------

struct PipelineResult {
  DiffSeries series;
  RateSchedule schedule;
  /// Baseline, EVSO, EVSO+, EVSO++ then the 2/3 comparison.
  std::vector<ProcessedVideo> videos;
  std::vector<VariantReport> reports;

  const ProcessedVideo& video(Variant v) const;
  const VariantReport& report(Variant v) const;
};

PipelineResult run_pipeline(const FrameSequence& sequence, const PipelineConfig& config = {});

struct PipelineOutputs {
  bool write_hold = false;  ///< also write hold/<variant>.y4m
};

/// Writes, into a fresh out_dir:
///   diff_series.csv, schedule.json, quality_report.json, manifest.mpd,
///   <level>/main/seg_NNNNN.y4m for baseline/high/medium/low, two_thirds.y4m
/// All files are staged in a sibling directory and moved into place at the end.
EmpdManifest write_pipeline(const PipelineResult& result, const FrameSequence& sequence, const PipelineConfig& config,
                            const std::filesystem::path& out_dir, const PipelineOutputs& options = {});

/// Staging directory that replaces `target` on commit and is removed otherwise.
class StagedDirectory {
 public:
  explicit StagedDirectory(std::filesystem::path target);
  ~StagedDirectory();
  StagedDirectory(const StagedDirectory&) = delete;
  StagedDirectory& operator=(const StagedDirectory&) = delete;

  const std::filesystem::path& path() const noexcept { return staging_; }
  void commit();

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

// ---- correlation study ----------------------------------------------------

/// Eight 64x64, 30-frame, 30 fps clips: static at luma 64/128/192, a 16 px
/// white block on black moving at 2, 8 and 16 px/frame, and noise
/// (seed 1, amplitude 255) and (seed 2, amplitude 64). 232 pairs in total.
std::vector<FrameSequence> standard_corpus();

/// {"sequences": [{"kind": "static"|"moving_block"|"noise"|"file", ...}]}
std::vector<FrameSequence> load_corpus(const nlohmann::json& spec);

struct CorrelationReport {
  std::size_t pairs = 0;
  double pcc = 0.0;               ///< Pearson(m_diff, ssim)
  std::optional<double> y_diff_pcc;  ///< Pearson(y_diff, ssim), absent if undefined
  LinearFit fit;                  ///< ssim ~ m_diff
};

CorrelationReport correlate(std::span<const FrameSequence> corpus, const SimilarityConfig& config = {});
nlohmann::ordered_json to_json(const CorrelationReport& report);

}  // namespace evso
