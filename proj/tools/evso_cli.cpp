#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "evso/config.hpp"
#include "evso/empd.hpp"
#include "evso/error.hpp"
#include "evso/pipeline.hpp"
#include "evso/stream_sim.hpp"
#include "evso/y4m.hpp"

namespace fs = std::filesystem;
using namespace evso;

namespace {

// Name of the module currently running, used to attribute errors.
std::string g_stage = "cli";

struct Globals {
  std::string config_path;
  std::string output_dir;
  bool show_config = false;
};

struct InputFlags {
  std::string path;
  int width = 0;
  int height = 0;
  double fps = 0.0;
  std::string layout = "i420";

  InputSpec spec() const {
    InputSpec s;
    s.path = path;
    if (width > 0 || height > 0) s.dims = FrameDims{width, height};
    if (fps > 0.0) s.fps = FrameRate::from_double(fps);
    s.layout = layout == "y" ? RawLayout::YOnly : RawLayout::I420;
    return s;
  }
};

void add_input(CLI::App* cmd, InputFlags& in) {
  cmd->add_option("input", in.path, "Y4M file, or raw planar YUV with --width/--height/--fps")->required();
  auto* raw = cmd->add_option_group("raw input");
  raw->add_option("--width", in.width, "frame width of a raw file");
  raw->add_option("--height", in.height, "frame height of a raw file");
  raw->add_option("--fps", in.fps, "frame rate of a raw file");
  raw->add_option("--layout", in.layout, "raw layout")->check(CLI::IsMember({"i420", "y"}));
}

FrameSequence load(const InputFlags& in) {
  g_stage = "frame_source";
  return load_input(in.spec());
}

PipelineConfig effective_config(const Globals& g) {
  g_stage = "config";
  return g.config_path.empty() ? PipelineConfig{} : load_config(g.config_path);
}

// Writes to --output-dir/<name> when set, else stdout.
void emit(const Globals& g, const std::string& name, const std::string& content) {
  if (g.output_dir.empty()) {
    std::cout << content;
    return;
  }
  const fs::path dir(g.output_dir);
  fs::create_directories(dir);
  const auto tmp = dir / ("." + name + ".tmp");
  write_file(tmp, content);
  fs::rename(tmp, dir / name);
}

fs::path require_output_dir(const Globals& g, const std::string& command) {
  if (g.output_dir.empty()) throw Error(ErrorCode::InvalidArgument, command + " needs --output-dir");
  return g.output_dir;
}

Variant parse_variant(const std::string& key) {
  for (auto v : {Variant::Baseline, Variant::Evso, Variant::EvsoPlus, Variant::EvsoPlusPlus, Variant::TwoThirds}) {
    if (variant_key(v) == key) return v;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown profile '" + key + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, path + " is not valid JSON: " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

nlohmann::ordered_json manifest_summary(const EmpdManifest& m) {
  nlohmann::ordered_json j;
  j["duration"] = m.duration();
  auto& periods = j["periods"] = nlohmann::ordered_json::array();
  for (const auto& p : m.periods) {
    nlohmann::ordered_json pj;
    pj["duration"] = p.duration;
    auto& sets = pj["adaptation_sets"] = nlohmann::ordered_json::array();
    for (const auto& s : p.adaptation_sets) {
      nlohmann::ordered_json sj;
      sj["content_type"] = s.content_type == ContentType::Video ? "video" : "audio";
      sj["evso_level"] = s.evso_level ? nlohmann::ordered_json(std::string(to_string(*s.evso_level)))
                                      : nlohmann::ordered_json();
      auto& reps = sj["representations"] = nlohmann::ordered_json::array();
      for (const auto& r : s.representations) {
        reps.push_back({{"id", r.id},
                        {"bandwidth", r.bandwidth},
                        {"width", r.width},
                        {"height", r.height},
                        {"mime_type", r.mime_type},
                        {"segments", r.segment_urls.size()}});
      }
      sets.push_back(std::move(sj));
    }
    periods.push_back(std::move(pj));
  }
  return j;
}

SegmentServer* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Energy-aware video streaming optimisation: frame-rate scheduling and EMPD manifests"};
  app.require_subcommand(0, 1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON file overriding the default constants")->check(CLI::ExistingFile);
  app.add_option("--output-dir", g.output_dir, "directory for command outputs");
  app.add_flag("--show-config", g.show_config, "print the effective configuration and exit");

  // analyze
  InputFlags analyze_in;
  bool with_ssim = false;
  auto* analyze = app.add_subcommand("analyze", "per-pair M-Diff, Y-Diff and optional SSIM as CSV");
  add_input(analyze, analyze_in);
  analyze->add_flag("--ssim", with_ssim, "also compute SSIM for every pair");

  // split / schedule
  InputFlags split_in, schedule_in;
  auto* split_cmd = app.add_subcommand("split", "chunk boundaries as JSON");
  add_input(split_cmd, split_in);
  auto* schedule_cmd = app.add_subcommand("schedule", "per-chunk frame rates for every profile as JSON");
  add_input(schedule_cmd, schedule_in);

  // process
  InputFlags process_in;
  std::string schedule_path, profile_key_arg = "evso", mode_arg = "hold";
  auto* process_cmd = app.add_subcommand("process", "retime a video with a schedule and write Y4M");
  add_input(process_cmd, process_in);
  process_cmd->add_option("--schedule", schedule_path, "schedule JSON; computed from the input when omitted")
      ->check(CLI::ExistingFile);
  process_cmd->add_option("--profile", profile_key_arg, "evso, evso_plus, evso_plus_plus, baseline or two_thirds");
  process_cmd->add_option("--mode", mode_arg, "hold or per-chunk")->check(CLI::IsMember({"hold", "per-chunk"}));

  // pipeline
  InputFlags pipeline_in;
  bool write_hold = false;
  auto* pipeline_cmd = app.add_subcommand("pipeline", "full server-side flow into --output-dir");
  add_input(pipeline_cmd, pipeline_in);
  pipeline_cmd->add_flag("--hold", write_hold, "also write source-rate hold streams for every variant");

  // manifest
  std::string mpd_path;
  auto* manifest_cmd = app.add_subcommand("manifest", "parse and validate an MPD, print a JSON summary");
  manifest_cmd->add_option("mpd", mpd_path)->required()->check(CLI::ExistingFile);

  // correlate
  std::string corpus_path;
  auto* correlate_cmd = app.add_subcommand("correlate", "M-Diff versus SSIM correlation over a corpus");
  correlate_cmd->add_option("--corpus", corpus_path, "corpus JSON; the built-in synthetic corpus when omitted")
      ->check(CLI::ExistingFile);

  // simulate
  std::string sim_mpd, trace_path, battery_arg;
  auto* simulate_cmd = app.add_subcommand("simulate", "battery-aware representation selection per segment");
  simulate_cmd->add_option("mpd", sim_mpd)->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--trace", trace_path, "CSV: segment_index,bandwidth_bps[,battery_level]")
      ->required()
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--battery", battery_arg, "fixed battery level, overriding the trace column");

  // serve
  std::string serve_dir, host = "127.0.0.1";
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "serve a pipeline output directory over HTTP");
  serve_cmd->add_option("dir", serve_dir)->required()->check(CLI::ExistingDirectory);
  serve_cmd->add_option("--host", host);
  serve_cmd->add_option("--port", port, "0 picks a free port");

  // synth
  std::string synth_kind, synth_out;
  int s_width = 64, s_height = 64, s_luma = 128, s_edge = 16, s_velocity = 8, s_fg = 255, s_bg = 0, s_amp = 255;
  std::size_t s_frames = 30;
  double s_fps = 30.0;
  std::uint32_t s_seed = 1;
  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic Y4M fixture");
  synth_cmd->add_option("kind", synth_kind)->required()->check(CLI::IsMember({"static", "moving", "noise"}));
  synth_cmd->add_option("-o,--out", synth_out, "output .y4m path")->required();
  synth_cmd->add_option("--width", s_width);
  synth_cmd->add_option("--height", s_height);
  synth_cmd->add_option("--frames", s_frames);
  synth_cmd->add_option("--fps", s_fps);
  synth_cmd->add_option("--luma", s_luma, "static luma value");
  synth_cmd->add_option("--edge", s_edge, "moving block edge in px");
  synth_cmd->add_option("--velocity", s_velocity, "moving block speed in px/frame");
  synth_cmd->add_option("--fg", s_fg);
  synth_cmd->add_option("--bg", s_bg);
  synth_cmd->add_option("--seed", s_seed);
  synth_cmd->add_option("--amplitude", s_amp, "noise amplitude");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto config = effective_config(g);
    g_stage = "cli";
    if (g.show_config) {
      std::cout << show_config(config);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cout << app.help();
      return 1;
    }

    if (*analyze) {
      const auto seq = load(analyze_in);
      g_stage = "similarity";
      emit(g, "diff_series.csv", diff_series_csv(diff_series(seq, config.similarity, with_ssim)));
    } else if (*split_cmd) {
      const auto seq = load(split_in);
      g_stage = "similarity";
      const auto series = diff_series(seq, config.similarity);
      g_stage = "fscheduler";
      emit(g, "split.json", plan_to_json(series, split(series, config.split), config).dump(2) + "\n");
    } else if (*schedule_cmd) {
      const auto seq = load(schedule_in);
      g_stage = "similarity";
      const auto series = diff_series(seq, config.similarity);
      g_stage = "fscheduler";
      emit(g, "schedule.json", schedule_to_json(schedule(series, config.split, config.schedule), config).dump(2) + "\n");
    } else if (*process_cmd) {
      const auto out_dir = require_output_dir(g, "process");
      const auto seq = load(process_in);
      g_stage = "fscheduler";
      RateSchedule sched;
      if (!schedule_path.empty()) {
        sched = schedule_from_json(read_json_file(schedule_path));
      } else {
        sched = schedule(diff_series(seq, config.similarity), config.split, config.schedule);
      }
      g_stage = "vprocessor";
      const auto variant = parse_variant(profile_key_arg);
      ProcessedVideo video;
      switch (variant) {
        case Variant::Baseline: video = process_unmodified(seq, sched.plan()); break;
        case Variant::TwoThirds: video = decimate_two_thirds(seq); break;
        case Variant::Evso: video = process(seq, sched, ProfileId::Evso); break;
        case Variant::EvsoPlus: video = process(seq, sched, ProfileId::EvsoPlus); break;
        case Variant::EvsoPlusPlus: video = process(seq, sched, ProfileId::EvsoPlusPlus); break;
      }
      const auto mode = mode_arg == "hold" ? OutputMode::Hold : OutputMode::PerChunk;
      const auto streams = write_y4m(video, seq, mode);
      StagedDirectory staged(out_dir);
      const std::string key(variant_key(variant));
      if (mode == OutputMode::Hold) {
        write_file(staged.path() / (key + ".y4m"), streams.front());
      } else {
        fs::create_directories(staged.path() / key);
        for (std::size_t c = 0; c < streams.size(); ++c) {
          char name[32];
          std::snprintf(name, sizeof(name), "seg_%05zu.y4m", c);
          write_file(staged.path() / key / name, streams[c]);
        }
      }
      const auto report = to_json(report_variant(video, seq));
      write_file(staged.path() / "report.json", report.dump(2) + "\n");
      staged.commit();
      std::cout << report.dump(2) << "\n";
    } else if (*pipeline_cmd) {
      const auto out_dir = require_output_dir(g, "pipeline");
      const auto seq = load(pipeline_in);
      g_stage = "pipeline";
      const auto result = run_pipeline(seq, config);
      g_stage = "empd";
      write_pipeline(result, seq, config, out_dir, {write_hold});
      nlohmann::ordered_json summary = nlohmann::ordered_json::array();
      for (const auto& r : result.reports) summary.push_back(to_json(r));
      std::cout << summary.dump(2) << "\n";
    } else if (*manifest_cmd) {
      g_stage = "empd";
      emit(g, "manifest.json", manifest_summary(parse_xml(read_text_file(mpd_path))).dump(2) + "\n");
    } else if (*correlate_cmd) {
      g_stage = "cli";
      const auto corpus = corpus_path.empty() ? standard_corpus() : load_corpus(read_json_file(corpus_path));
      g_stage = "similarity";
      emit(g, "correlation.json", to_json(correlate(corpus, config.similarity)).dump(2) + "\n");
    } else if (*simulate_cmd) {
      g_stage = "empd";
      const auto manifest = parse_xml(read_text_file(sim_mpd));
      g_stage = "stream_sim";
      std::ifstream trace_in(trace_path);
      auto trace = read_trace_csv(trace_in);
      if (!battery_arg.empty()) trace.battery.assign(1, parse_battery(battery_arg));
      std::ostringstream out;
      write_session_csv(out, simulate_session(manifest, trace.bandwidth_bps, trace.battery));
      emit(g, "session.csv", out.str());
    } else if (*serve_cmd) {
      g_stage = "stream_sim";
      SegmentServer server(serve_dir, host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "serving " << serve_dir << " on http://" << host << ":" << server.port() << "/" << std::endl;
      server.run();
      g_server = nullptr;
    } else if (*synth_cmd) {
      g_stage = "frame_source";
      const FrameDims dims{s_width, s_height};
      const auto fps = FrameRate::from_double(s_fps);
      FrameSequence seq = synth_kind == "static"   ? synth_static(dims, s_frames, s_luma, fps)
                          : synth_kind == "moving" ? synth_moving_block(dims, s_frames, s_edge, s_velocity, s_fg, s_bg, fps)
                                                   : synth_noise(dims, s_frames, s_seed, s_amp, fps);
      if (!fs::path(synth_out).parent_path().empty()) fs::create_directories(fs::path(synth_out).parent_path());
      write_file(synth_out, to_y4m_bytes(seq));
    }
  } catch (const Error& e) {
    std::cerr << "evso: " << g_stage << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "evso: " << g_stage << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
