#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "evso/empd.hpp"
#include "evso/frame_source.hpp"
#include "evso/vprocessor.hpp"
#include "test_util.hpp"

using namespace evso;

namespace {

Representation rep(std::string id, std::uint64_t bw, std::vector<std::string> urls, int w = 64, int h = 64,
                   std::string mime = "video/x-y4m") {
  return {std::move(id), bw, w, h, std::move(mime), std::move(urls)};
}

EmpdManifest random_manifest(std::mt19937& rng) {
  const std::string alphabet = "abcXYZ019-_.&<>\"' /";
  auto token = [&](std::size_t len) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % alphabet.size()];
    return s;
  };
  EmpdManifest m;
  const int periods = 1 + static_cast<int>(rng() % 3);
  for (int p = 0; p < periods; ++p) {
    Period period;
    period.duration = std::uniform_real_distribution<double>(0.0, 7200.0)(rng);
    std::vector<EvsoLevel> levels(kAllLevels.begin(), kAllLevels.end());
    std::shuffle(levels.begin(), levels.end(), rng);
    levels.resize(1 + rng() % 4);
    for (auto level : levels) {
      AdaptationSet set;
      set.evso_level = level;
      const int reps = 1 + static_cast<int>(rng() % 3);
      for (int r = 0; r < reps; ++r) {
        std::vector<std::string> urls;
        const int segs = 1 + static_cast<int>(rng() % 6);
        for (int s = 0; s < segs; ++s) urls.push_back(token(1 + rng() % 12));
        set.representations.push_back(rep(token(1 + rng() % 8), 1 + rng() % 100000000,
                                          std::move(urls), 16 * (1 + static_cast<int>(rng() % 120)),
                                          16 * (1 + static_cast<int>(rng() % 68))));
      }
      period.adaptation_sets.push_back(std::move(set));
    }
    if (rng() % 2) {
      AdaptationSet audio;
      audio.content_type = ContentType::Audio;
      audio.representations.push_back(rep("a" + token(3), 128000, {"audio.m4a"}, 0, 0, "audio/mp4"));
      period.adaptation_sets.push_back(std::move(audio));
    }
    m.periods.push_back(std::move(period));
  }
  return m;
}

}  // namespace

TEST(Levels, Vocabulary) {
  EXPECT_EQ(to_string(EvsoLevel::Baseline), "baseline");
  EXPECT_EQ(to_string(EvsoLevel::Low), "low");
  for (auto l : kAllLevels) EXPECT_EQ(parse_evso_level(to_string(l)), l);
  EXPECT_FALSE(parse_evso_level("ultra").has_value());
  EXPECT_EQ(level_for(ProfileId::Evso), EvsoLevel::High);
  EXPECT_EQ(level_for(ProfileId::EvsoPlus), EvsoLevel::Medium);
  EXPECT_EQ(level_for(ProfileId::EvsoPlusPlus), EvsoLevel::Low);
}

TEST(Segments, DefaultNaming) {
  EXPECT_EQ(default_segment_name(EvsoLevel::Medium, "main", 7), "medium/main/seg_00007.y4m");
}

TEST(RoundTrip, RandomManifests) {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const auto original = random_manifest(rng);
    const auto xml = serialize_xml(original);
    const auto parsed = parse_xml(xml);
    ASSERT_EQ(parsed, original) << xml;
    EXPECT_EQ(serialize_xml(parsed), xml);
  }
}

TEST(Serialize, ContainsLevelAttributes) {
  EmpdManifest m;
  m.periods.push_back({12.5, {{ContentType::Video, EvsoLevel::Low, {rep("low-main", 1000, {"x.y4m"})}}}});
  const auto xml = serialize_xml(m);
  EXPECT_NE(xml.find("EVSOLevel=\"low\""), std::string::npos);
  EXPECT_NE(xml.find("mediaPresentationDuration=\"PT12.5S\""), std::string::npos);
  EXPECT_NE(xml.find("<SegmentURL media=\"x.y4m\"/>"), std::string::npos);
}

TEST(Parse, PlainDashLoadsAsBaseline) {
  const std::string xml = R"(<?xml version="1.0"?>
<MPD xmlns="urn:mpeg:dash:schema:mpd:2011" type="static" mediaPresentationDuration="PT1M30S" minBufferTime="PT1.5S">
  <Period>
    <AdaptationSet mimeType="video/mp4" segmentAlignment="true">
      <Representation id="v720" bandwidth="2500000" width="1280" height="720" codecs="avc1.64001f">
        <BaseURL>video_720.mp4</BaseURL>
      </Representation>
      <Representation id="v360" bandwidth="800000" width="640" height="360">
        <SegmentList duration="4"><SegmentURL media="v360_1.m4s"/><SegmentURL media="v360_2.m4s"/></SegmentList>
      </Representation>
    </AdaptationSet>
    <AdaptationSet mimeType="audio/mp4">
      <Representation id="a" bandwidth="128000"><BaseURL>audio.mp4</BaseURL></Representation>
    </AdaptationSet>
  </Period>
</MPD>)";
  const auto m = parse_xml(xml);
  ASSERT_EQ(m.periods.size(), 1u);
  EXPECT_DOUBLE_EQ(m.duration(), 90.0);
  const auto& sets = m.periods[0].adaptation_sets;
  ASSERT_EQ(sets.size(), 2u);
  EXPECT_EQ(sets[0].content_type, ContentType::Video);
  EXPECT_EQ(sets[0].evso_level, EvsoLevel::Baseline);
  EXPECT_EQ(sets[0].representations[0].segment_urls, std::vector<std::string>{"video_720.mp4"});
  EXPECT_EQ(sets[0].representations[0].mime_type, "video/mp4");
  EXPECT_EQ(sets[0].representations[1].segment_urls.size(), 2u);
  EXPECT_EQ(sets[1].content_type, ContentType::Audio);
  EXPECT_FALSE(sets[1].evso_level.has_value());
}

TEST(Parse, Rejections) {
  EXPECT_EVSO_ERROR(parse_xml("<MPD><Period>"), ErrorCode::MalformedXml);
  EXPECT_EVSO_ERROR(parse_xml("<Manifest/>"), ErrorCode::MalformedXml);
  const std::string dup = R"(<MPD><Period duration="PT1S">
    <AdaptationSet contentType="video" EVSOLevel="high"><Representation id="a" bandwidth="1"><BaseURL>a</BaseURL></Representation></AdaptationSet>
    <AdaptationSet contentType="video" EVSOLevel="high"><Representation id="b" bandwidth="1"><BaseURL>b</BaseURL></Representation></AdaptationSet>
  </Period></MPD>)";
  EXPECT_EVSO_ERROR(parse_xml(dup), ErrorCode::InvariantViolation);
  const std::string unknown = R"(<MPD><Period duration="PT1S">
    <AdaptationSet contentType="video" EVSOLevel="turbo"><Representation id="a" bandwidth="1"><BaseURL>a</BaseURL></Representation></AdaptationSet>
  </Period></MPD>)";
  EXPECT_EVSO_ERROR(parse_xml(unknown), ErrorCode::InvariantViolation);
  const std::string audio_level = R"(<MPD><Period duration="PT1S">
    <AdaptationSet contentType="audio" EVSOLevel="low"><Representation id="a" bandwidth="1"><BaseURL>a</BaseURL></Representation></AdaptationSet>
  </Period></MPD>)";
  EXPECT_EVSO_ERROR(parse_xml(audio_level), ErrorCode::InvariantViolation);
  const std::string bad_number = R"(<MPD><Period duration="PT1S">
    <AdaptationSet contentType="video"><Representation id="a" bandwidth="fast"><BaseURL>a</BaseURL></Representation></AdaptationSet>
  </Period></MPD>)";
  EXPECT_EVSO_ERROR(parse_xml(bad_number), ErrorCode::MalformedXml);
  EXPECT_EVSO_ERROR(parse_xml(R"(<MPD><Period duration="1 hour"/></MPD>)"), ErrorCode::MalformedXml);
}

TEST(Validate, StructuralRules) {
  EXPECT_EVSO_ERROR(EmpdManifest{}.validate(), ErrorCode::InvariantViolation);
  EmpdManifest m;
  m.periods.push_back({1.0, {{ContentType::Video, std::nullopt, {rep("a", 1, {"a"})}}}});
  EXPECT_EVSO_ERROR(m.validate(), ErrorCode::InvariantViolation);
  m.periods[0].adaptation_sets[0].evso_level = EvsoLevel::High;
  EXPECT_NO_THROW(m.validate());
  m.periods[0].adaptation_sets[0].representations[0].bandwidth = 0;
  EXPECT_EVSO_ERROR(m.validate(), ErrorCode::InvariantViolation);
  m.periods[0].adaptation_sets[0].representations[0].bandwidth = 1;
  m.periods[0].adaptation_sets[0].representations[0].segment_urls.clear();
  EXPECT_EVSO_ERROR(m.validate(), ErrorCode::InvariantViolation);
}

TEST(Build, FromProcessedVideos) {
  const auto seq = synth_static({32, 32}, 90, 10, FrameRate(30, 1));
  const ChunkPlan plan{{{0, 40}, {40, 90}}, seq.fps()};
  const auto base = process_unmodified(seq, plan);
  RateSchedule sched;
  sched.fps = seq.fps();
  for (auto r : plan.chunks) sched.chunks.push_back({r, 0.0, {18, 15, 12.9}});
  const auto low = process(seq, sched, ProfileId::EvsoPlusPlus);
  const auto high = process(seq, sched, ProfileId::Evso);
  // Out of order on purpose; sets come back sorted by level.
  const std::vector<ManifestVariant> variants{
      {EvsoLevel::Low, "main", low, 500, seq.dims()},
      {EvsoLevel::Baseline, "main", base, 2000, seq.dims()},
      {EvsoLevel::High, "main", high, 1200, seq.dims()},
  };
  const auto m = build_manifest(variants, 3.0);
  ASSERT_EQ(m.periods.size(), 1u);
  const auto& sets = m.periods[0].adaptation_sets;
  ASSERT_EQ(sets.size(), 3u);
  EXPECT_EQ(sets[0].evso_level, EvsoLevel::Baseline);
  EXPECT_EQ(sets[1].evso_level, EvsoLevel::High);
  EXPECT_EQ(sets[2].evso_level, EvsoLevel::Low);
  EXPECT_EQ(sets[2].representations[0].id, "low-main");
  EXPECT_EQ(sets[2].representations[0].segment_urls,
            (std::vector<std::string>{"low/main/seg_00000.y4m", "low/main/seg_00001.y4m"}));
  EXPECT_EQ(parse_xml(serialize_xml(m)), m);
}

TEST(Build, Errors) {
  const auto seq = synth_static({16, 16}, 60, 0, FrameRate(30, 1));
  const auto one = process_unmodified(seq, ChunkPlan{{{0, 60}}, seq.fps()});
  const auto two = process_unmodified(seq, ChunkPlan{{{0, 31}, {31, 60}}, seq.fps()});
  EXPECT_EVSO_ERROR(build_manifest({}, 2.0), ErrorCode::NoVideoSets);
  const std::vector<ManifestVariant> mismatch{{EvsoLevel::Baseline, "main", one, 10, seq.dims()},
                                              {EvsoLevel::High, "main", two, 10, seq.dims()}};
  EXPECT_EVSO_ERROR(build_manifest(mismatch, 2.0), ErrorCode::ChunkCountMismatch);
  const std::vector<ManifestVariant> dup{{EvsoLevel::High, "main", one, 10, seq.dims()},
                                         {EvsoLevel::High, "main", one, 10, seq.dims()}};
  EXPECT_EVSO_ERROR(build_manifest(dup, 2.0), ErrorCode::InvariantViolation);
  const std::vector<ManifestVariant> two_reps{{EvsoLevel::High, "main", one, 10, seq.dims()},
                                              {EvsoLevel::High, "alt", one, 20, seq.dims()}};
  EXPECT_EQ(build_manifest(two_reps, 2.0).periods[0].adaptation_sets[0].representations.size(), 2u);
}
