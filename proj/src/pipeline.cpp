#include "evso/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "evso/error.hpp"
#include "evso/statistics.hpp"
#include "evso/y4m.hpp"

namespace evso {

FrameSequence load_input(const InputSpec& spec) {
  if (spec.path.extension() == ".y4m") return read_y4m_file(spec.path);
  if (!spec.dims || !spec.fps) {
    throw Error(ErrorCode::InvalidArgument, "raw input " + spec.path.string() + " needs width, height and fps");
  }
  return read_raw_yuv(spec.path, *spec.dims, *spec.fps, spec.layout);
}

std::string diff_series_csv(const DiffSeries& series) {
  std::ostringstream out;
  out << "pair_index,m_diff,y_diff,ssim\n";
  char buf[32];
  for (std::size_t i = 0; i < series.pairs.size(); ++i) {
    const auto& p = series.pairs[i];
    out << i << ',' << p.m_diff << ',' << p.y_diff << ',';
    if (p.ssim) {
      std::snprintf(buf, sizeof(buf), "%.6f", *p.ssim);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

namespace {

nlohmann::ordered_json frame_rate_json(const FrameRate& fps) {
  return nlohmann::ordered_json{{"num", fps.num}, {"den", fps.den}};
}

nlohmann::ordered_json chunk_json(ChunkRange range, double sigma) {
  return nlohmann::ordered_json{{"start", range.start}, {"end", range.end}, {"sigma", json_number(sigma)}};
}

}  // namespace

nlohmann::ordered_json plan_to_json(const DiffSeries& series, const ChunkPlan& plan, const PipelineConfig& config) {
  nlohmann::ordered_json j;
  auto& chunks = j["chunks"] = nlohmann::ordered_json::array();
  for (const auto& range : plan.chunks) {
    const double sigma = range.length() >= 2 ? chunk_sigma(series, range) : 0.0;
    chunks.push_back(chunk_json(range, sigma));
  }
  j["gamma"] = json_number(plan.fps.value());
  j["frame_rate"] = frame_rate_json(plan.fps);
  j["config"] = to_json(config);
  return j;
}

nlohmann::ordered_json schedule_to_json(const RateSchedule& schedule, const PipelineConfig& config) {
  nlohmann::ordered_json j;
  auto& chunks = j["chunks"] = nlohmann::ordered_json::array();
  for (const auto& c : schedule.chunks) {
    auto entry = chunk_json(c.range, c.sigma);
    auto& rates = entry["rates"] = nlohmann::ordered_json::object();
    for (auto id : kAllProfiles) rates[std::string(profile_key(id))] = json_number(c.rate(id));
    chunks.push_back(std::move(entry));
  }
  j["gamma"] = json_number(schedule.fps.value());
  j["frame_rate"] = frame_rate_json(schedule.fps);
  j["config"] = to_json(config);
  return j;
}

RateSchedule schedule_from_json(const nlohmann::json& j) {
  try {
    RateSchedule out;
    out.fps = FrameRate(j.at("frame_rate").at("num").get<std::int64_t>(), j.at("frame_rate").at("den").get<std::int64_t>());
    std::size_t expected_start = 0;
    for (const auto& c : j.at("chunks")) {
      ScheduledChunk sc;
      sc.range = {c.at("start").get<std::size_t>(), c.at("end").get<std::size_t>()};
      if (sc.range.start != expected_start || sc.range.end <= sc.range.start) {
        throw Error(ErrorCode::ScheduleMismatch, "schedule chunks are not a contiguous partition");
      }
      expected_start = sc.range.end;
      sc.sigma = c.at("sigma").get<double>();
      for (auto id : kAllProfiles) {
        sc.rates[static_cast<std::size_t>(id)] = c.at("rates").at(std::string(profile_key(id))).get<double>();
      }
      out.chunks.push_back(sc);
    }
    if (out.chunks.empty()) throw Error(ErrorCode::ScheduleMismatch, "schedule has no chunks");
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed schedule JSON: ") + e.what());
  }
}

VariantReport report_variant(const ProcessedVideo& processed, const FrameSequence& source) {
  VariantReport r;
  r.variant = processed.variant;
  for (const auto& c : processed.chunks) r.kept_counts.push_back(c.kept.size());
  r.avg_fps = avg_frame_rate(processed);
  r.mean_ssim_pct = quality_report(source, hold_sequence(processed, source)).mean_ssim_pct;
  return r;
}

nlohmann::ordered_json to_json(const VariantReport& report) {
  return nlohmann::ordered_json{{"profile", std::string(variant_key(report.variant))},
                                {"kept_counts", report.kept_counts},
                                {"avg_fps", report.avg_fps},
                                {"mean_ssim_pct", report.mean_ssim_pct}};
}

const ProcessedVideo& PipelineResult::video(Variant v) const {
  for (const auto& p : videos) {
    if (p.variant == v) return p;
  }
  throw Error(ErrorCode::InvalidArgument, "no processed video for " + std::string(variant_key(v)));
}

const VariantReport& PipelineResult::report(Variant v) const {
  for (const auto& r : reports) {
    if (r.variant == v) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "no report for " + std::string(variant_key(v)));
}

PipelineResult run_pipeline(const FrameSequence& sequence, const PipelineConfig& config) {
  config.validate();
  PipelineResult result;
  result.series = diff_series(sequence, config.similarity, false);
  result.schedule = schedule(result.series, config.split, config.schedule);
  result.videos.push_back(process_unmodified(sequence, result.schedule.plan()));
  for (auto id : kAllProfiles) result.videos.push_back(process(sequence, result.schedule, id));
  result.videos.push_back(decimate_two_thirds(sequence));
  for (const auto& v : result.videos) result.reports.push_back(report_variant(v, sequence));
  return result;
}

StagedDirectory::StagedDirectory(std::filesystem::path target) : target_(std::move(target)) {
  if (target_.filename().empty()) target_ = target_.parent_path();
  const auto parent = target_.has_parent_path() ? target_.parent_path() : std::filesystem::path(".");
  staging_ = parent / ("." + target_.filename().string() + ".staging-" + std::to_string(::getpid()));
  std::error_code ec;
  std::filesystem::remove_all(staging_, ec);
  std::filesystem::create_directories(staging_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create staging directory " + staging_.string());
}

StagedDirectory::~StagedDirectory() {
  if (!committed_) {
    std::error_code ec;
    std::filesystem::remove_all(staging_, ec);
  }
}

void StagedDirectory::commit() {
  std::error_code ec;
  std::filesystem::remove_all(target_, ec);
  std::filesystem::rename(staging_, target_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot move outputs into " + target_.string() + ": " + ec.message());
  committed_ = true;
}

EmpdManifest write_pipeline(const PipelineResult& result, const FrameSequence& sequence, const PipelineConfig& config,
                            const std::filesystem::path& out_dir, const PipelineOutputs& options) {
  StagedDirectory staged(out_dir);
  const auto& root = staged.path();
  const double duration = sequence.duration();

  write_file(root / "diff_series.csv", diff_series_csv(result.series));
  write_file(root / "schedule.json", schedule_to_json(result.schedule, config).dump(2) + "\n");

  nlohmann::ordered_json report;
  report["gamma"] = json_number(sequence.fps().value());
  report["frames"] = sequence.size();
  auto& variants = report["variants"] = nlohmann::ordered_json::array();
  for (const auto& r : result.reports) variants.push_back(to_json(r));
  write_file(root / "quality_report.json", report.dump(2) + "\n");

  const std::array<std::pair<Variant, EvsoLevel>, 4> levels = {{{Variant::Baseline, EvsoLevel::Baseline},
                                                                {Variant::Evso, EvsoLevel::High},
                                                                {Variant::EvsoPlus, EvsoLevel::Medium},
                                                                {Variant::EvsoPlusPlus, EvsoLevel::Low}}};
  std::vector<ManifestVariant> listed;
  for (const auto& [variant, level] : levels) {
    const auto& video = result.video(variant);
    const auto segments = write_y4m(video, sequence, OutputMode::PerChunk);
    std::size_t bytes = 0;
    for (std::size_t c = 0; c < segments.size(); ++c) {
      const auto path = root / default_segment_name(level, "main", c);
      std::filesystem::create_directories(path.parent_path());
      write_file(path, segments[c]);
      bytes += segments[c].size();
    }
    const auto bandwidth = static_cast<std::uint64_t>(std::ceil(static_cast<double>(bytes) * 8.0 / duration));
    listed.push_back(ManifestVariant{level, "main", std::cref(video), std::max<std::uint64_t>(bandwidth, 1),
                                     sequence.dims()});
  }
  auto manifest = build_manifest(listed, duration);
  write_file(root / "manifest.mpd", serialize_xml(manifest));

  write_file(root / "two_thirds.y4m", write_y4m(result.video(Variant::TwoThirds), sequence, OutputMode::PerChunk).front());
  if (options.write_hold) {
    std::filesystem::create_directories(root / "hold");
    for (const auto& v : result.videos) {
      write_file(root / "hold" / (std::string(variant_key(v.variant)) + ".y4m"),
                 write_y4m(v, sequence, OutputMode::Hold).front());
    }
  }
  staged.commit();
  return manifest;
}

std::vector<FrameSequence> standard_corpus() {
  const FrameDims dims{64, 64};
  const FrameRate fps(30, 1);
  constexpr std::size_t count = 30;
  std::vector<FrameSequence> corpus;
  for (int luma : {64, 128, 192}) corpus.push_back(synth_static(dims, count, luma, fps));
  for (int velocity : {2, 8, 16}) corpus.push_back(synth_moving_block(dims, count, 16, velocity, 255, 0, fps));
  corpus.push_back(synth_noise(dims, count, 1, 255, fps));
  corpus.push_back(synth_noise(dims, count, 2, 64, fps));
  return corpus;
}

std::vector<FrameSequence> load_corpus(const nlohmann::json& spec) {
  std::vector<FrameSequence> corpus;
  try {
    for (const auto& s : spec.at("sequences")) {
      const auto kind = s.at("kind").get<std::string>();
      if (kind == "file") {
        corpus.push_back(read_y4m_file(s.at("path").get<std::string>()));
        continue;
      }
      const FrameDims dims{s.value("width", 64), s.value("height", 64)};
      const auto count = s.value<std::size_t>("count", 30);
      const FrameRate fps = FrameRate::from_double(s.value("fps", 30.0));
      if (kind == "static") {
        corpus.push_back(synth_static(dims, count, s.value("luma", 128), fps));
      } else if (kind == "moving_block") {
        corpus.push_back(synth_moving_block(dims, count, s.value("block_edge", 16), s.value("velocity", 8),
                                            s.value("fg", 255), s.value("bg", 0), fps));
      } else if (kind == "noise") {
        corpus.push_back(synth_noise(dims, count, s.value<std::uint32_t>("seed", 1), s.value("amplitude", 255), fps));
      } else {
        throw Error(ErrorCode::InvalidArgument, "unknown corpus kind '" + kind + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("malformed corpus spec: ") + e.what());
  }
  return corpus;
}

CorrelationReport correlate(std::span<const FrameSequence> corpus, const SimilarityConfig& config) {
  if (corpus.size() < 2) throw Error(ErrorCode::DegenerateInput, "corpus needs at least 2 sequences");
  std::vector<double> m, y, s;
  for (const auto& seq : corpus) {
    const auto series = diff_series(seq, config, true);
    for (const auto& p : series.pairs) {
      m.push_back(static_cast<double>(p.m_diff));
      y.push_back(static_cast<double>(p.y_diff));
      s.push_back(*p.ssim);
    }
  }
  CorrelationReport report;
  report.pairs = m.size();
  report.pcc = pearson(m, s);
  report.fit = fit_line(m, s);
  try {
    report.y_diff_pcc = pearson(y, s);
  } catch (const Error&) {
    report.y_diff_pcc.reset();
  }
  return report;
}

nlohmann::ordered_json to_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["pairs"] = report.pairs;
  j["pcc_m_diff_ssim"] = report.pcc;
  j["pcc_y_diff_ssim"] = report.y_diff_pcc ? nlohmann::ordered_json(*report.y_diff_pcc) : nlohmann::ordered_json();
  j["fit"] = {{"intercept", report.fit.intercept}, {"slope", report.fit.slope}, {"r_squared", report.fit.r_squared}};
  return j;
}

}  // namespace evso
