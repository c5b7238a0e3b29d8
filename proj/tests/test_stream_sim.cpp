#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "evso/stream_sim.hpp"
#include "test_util.hpp"

// After Eigen: resolv.h defines _res.
#include <httplib.h>

using namespace evso;

namespace {

Representation video_rep(std::string id, std::uint64_t bw, std::size_t segments) {
  Representation r{std::move(id), bw, 64, 64, "video/x-y4m", {}};
  for (std::size_t i = 0; i < segments; ++i) r.segment_urls.push_back(r.id + "/" + std::to_string(i));
  return r;
}

AdaptationSet video_set(EvsoLevel level, std::vector<Representation> reps) {
  return {ContentType::Video, level, std::move(reps)};
}

EmpdManifest full_manifest(std::size_t segments = 4) {
  EmpdManifest m;
  Period p;
  p.duration = 10;
  for (auto level : kAllLevels) {
    const std::string name(to_string(level));
    const std::uint64_t scale = 4 - static_cast<std::uint64_t>(level);
    p.adaptation_sets.push_back(video_set(
        level, {video_rep(name + "-lo", 100000 * scale, segments), video_rep(name + "-hi", 1000000 * scale, segments)}));
  }
  p.adaptation_sets.push_back({ContentType::Audio, std::nullopt, {{"aud", 64000, 0, 0, "audio/mp4", {"a"}}}});
  m.periods.push_back(std::move(p));
  return m;
}

std::filesystem::path temp_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("evso_stream_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Battery, Vocabulary) {
  for (auto s : {BatteryState::ChargingOrFull, BatteryState::High, BatteryState::Medium, BatteryState::Low}) {
    EXPECT_EQ(parse_battery(to_string(s)), s);
  }
  EXPECT_EQ(parse_battery("full"), BatteryState::ChargingOrFull);
  EXPECT_EVSO_ERROR(parse_battery("empty"), ErrorCode::InvalidArgument);
  EXPECT_EQ(preferred_level(BatteryState::ChargingOrFull), EvsoLevel::Baseline);
  EXPECT_EQ(preferred_level(BatteryState::Medium), EvsoLevel::Medium);
}

TEST(Select, EachBatteryStateGetsItsLevel) {
  const auto m = full_manifest();
  for (auto s : {BatteryState::ChargingOrFull, BatteryState::High, BatteryState::Medium, BatteryState::Low}) {
    const auto sel = select_representation(m, {s, 1e9});
    EXPECT_EQ(sel.level, preferred_level(s));
    EXPECT_EQ(sel.representation_id, std::string(to_string(sel.level)) + "-hi");
  }
}

TEST(Select, BandwidthRule) {
  const auto m = full_manifest();
  // Low level: lo = 100 kbit/s, hi = 1 Mbit/s.
  EXPECT_EQ(select_representation(m, {BatteryState::Low, 999999}).representation_id, "low-lo");
  EXPECT_EQ(select_representation(m, {BatteryState::Low, 1000000}).representation_id, "low-hi");
  EXPECT_EQ(select_representation(m, {BatteryState::Low, 10}).representation_id, "low-lo");
}

TEST(Select, FallbackPrefersLessAggressive) {
  EmpdManifest m;
  m.periods.push_back({10, {video_set(EvsoLevel::Baseline, {video_rep("b", 10, 2)}),
                            video_set(EvsoLevel::High, {video_rep("h", 10, 2)})}});
  auto sel = select_representation(m, {BatteryState::Low, 100});
  EXPECT_EQ(sel.level, EvsoLevel::High);
  EXPECT_EQ(sel.set_index, 1u);
  m.periods[0].adaptation_sets.erase(m.periods[0].adaptation_sets.begin() + 1);
  EXPECT_EQ(select_representation(m, {BatteryState::Medium, 100}).level, EvsoLevel::Baseline);
}

TEST(Select, FallbackToMoreAggressiveWhenNothingGentler) {
  EmpdManifest m;
  m.periods.push_back({10, {video_set(EvsoLevel::Low, {video_rep("l", 10, 2)})}});
  EXPECT_EQ(select_representation(m, {BatteryState::ChargingOrFull, 100}).level, EvsoLevel::Low);
}

TEST(Select, NoVideo) {
  EmpdManifest m;
  m.periods.push_back({10, {{ContentType::Audio, std::nullopt, {{"a", 1, 0, 0, "audio/mp4", {"a"}}}}}});
  EXPECT_EVSO_ERROR(select_representation(m, {BatteryState::High, 100}), ErrorCode::NoVideoSets);
  EXPECT_EVSO_ERROR(segment_count(m), ErrorCode::NoVideoSets);
}

TEST(Simulate, SelectionPropertiesOnRandomTraces) {
  const auto m = full_manifest(20);
  std::mt19937 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> bw;
    std::vector<BatteryState> bat;
    for (int i = 0; i < 20; ++i) {
      bw.push_back(1000.0 + static_cast<double>(rng() % 5000000));
      bat.push_back(static_cast<BatteryState>(rng() % 4));
    }
    const auto log = simulate_session(m, bw, bat);
    ASSERT_EQ(log.entries.size(), 20u);
    for (const auto& e : log.entries) {
      EXPECT_EQ(e.selection.level, preferred_level(e.state.battery));
      const auto& set = m.periods[0].adaptation_sets[e.selection.set_index];
      const auto& reps = set.representations;
      EXPECT_EQ(reps[e.selection.representation_index].id, e.selection.representation_id);
      EXPECT_EQ(e.segment_url, reps[e.selection.representation_index].segment_urls[e.segment_index]);
      // Nothing affordable was skipped in favour of a cheaper pick.
      for (const auto& r : reps) {
        if (static_cast<double>(r.bandwidth) <= e.state.bandwidth_bps) EXPECT_GE(e.selection.bandwidth, r.bandwidth);
      }
    }
  }
}

TEST(Simulate, ShortTracesHoldLastValue) {
  const auto m = full_manifest(5);
  const std::vector<double> bw{5e6, 50};
  const std::vector<BatteryState> bat{BatteryState::Low};
  const auto log = simulate_session(m, bw, bat);
  ASSERT_EQ(log.entries.size(), 5u);
  EXPECT_DOUBLE_EQ(log.entries[4].state.bandwidth_bps, 50);
  EXPECT_EQ(log.entries[4].state.battery, BatteryState::Low);
  const auto charging = simulate_session(m, bw, {});
  EXPECT_EQ(charging.entries[0].selection.level, EvsoLevel::Baseline);
  EXPECT_EVSO_ERROR(simulate_session(m, {}, {}), ErrorCode::InvalidArgument);
}

TEST(Trace, ParseWithHeaderAndBattery) {
  std::istringstream in("segment_index,bandwidth_bps,battery_level\n0,1000000,high\n1, 2e6 ,low\n\n# note\n2,300,charging\n");
  const auto t = read_trace_csv(in);
  EXPECT_EQ(t.bandwidth_bps, (std::vector<double>{1e6, 2e6, 300}));
  EXPECT_EQ(t.battery, (std::vector<BatteryState>{BatteryState::High, BatteryState::Low, BatteryState::ChargingOrFull}));
}

TEST(Trace, BandwidthOnly) {
  std::istringstream in("0,100\n1,200\n");
  const auto t = read_trace_csv(in);
  EXPECT_EQ(t.bandwidth_bps.size(), 2u);
  EXPECT_TRUE(t.battery.empty());
}

TEST(Trace, Rejections) {
  auto parse = [](const char* text) {
    std::istringstream in(text);
    return read_trace_csv(in);
  };
  EXPECT_EVSO_ERROR(parse("0,100\n2,100\n"), ErrorCode::InvalidArgument);
  EXPECT_EVSO_ERROR(parse("0,-5\n"), ErrorCode::InvalidArgument);
  EXPECT_EVSO_ERROR(parse("0,100,low\n1,100\n"), ErrorCode::InvalidArgument);
  EXPECT_EVSO_ERROR(parse("0,100,sleepy\n"), ErrorCode::InvalidArgument);
  EXPECT_EVSO_ERROR(parse("0\n"), ErrorCode::InvalidArgument);
  EXPECT_EVSO_ERROR(parse("0,1\nx,1\n"), ErrorCode::InvalidArgument);
}

TEST(Trace, SessionCsv) {
  const auto log = simulate_session(full_manifest(2), std::vector<double>{2e6}, std::vector<BatteryState>{BatteryState::High});
  std::ostringstream out;
  write_session_csv(out, log);
  std::istringstream lines(out.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header.substr(0, 14), "segment_index,");
  EXPECT_EQ(row, "0,high,2000000,high,high-lo,300000,high-lo/0");
}

TEST(Server, ServesManifestAndSegments) {
  const auto dir = temp_dir("serve");
  std::ofstream(dir / "manifest.mpd") << "<MPD/>";
  std::filesystem::create_directories(dir / "low" / "main");
  std::ofstream(dir / "low" / "main" / "seg_00000.y4m", std::ios::binary) << std::string("YUV4MPEG2 \0x", 12);
  SegmentServer server(dir, "127.0.0.1", 0);
  ASSERT_GT(server.port(), 0);
  server.start();
  httplib::Client client("127.0.0.1", server.port());
  auto res = client.Get("/manifest.mpd");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "<MPD/>");
  res = client.Get("/low/main/seg_00000.y4m");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body.size(), 12u);
  res = client.Get("/nope.y4m");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  res = client.Post("/manifest.mpd", "x", "text/plain");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 405);
  server.stop();
  std::filesystem::remove_all(dir);
}

TEST(Server, Errors) {
  const auto dir = temp_dir("errors");
  EXPECT_EVSO_ERROR(SegmentServer(dir, "127.0.0.1", 0), ErrorCode::MissingManifest);
  std::ofstream(dir / "manifest.mpd") << "<MPD/>";
  SegmentServer first(dir, "127.0.0.1", 0);
  EXPECT_EVSO_ERROR(SegmentServer(dir, "127.0.0.1", first.port()), ErrorCode::BindFailure);
  std::filesystem::remove_all(dir);
}
