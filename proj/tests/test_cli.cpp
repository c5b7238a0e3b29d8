#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run evso(const std::string& args) {
  const std::string cmd = std::string("\"") + EVSO_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int raw = ::pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("evso_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string at(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    out[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return out;
}

}  // namespace

TEST_F(Cli, AnalyzeStaticInput) {
  ASSERT_EQ(evso("synth static --frames 4 -o " + at("s.y4m")).status, 0);
  const auto plain = evso("analyze " + at("s.y4m"));
  EXPECT_EQ(plain.status, 0);
  EXPECT_EQ(plain.out, "pair_index,m_diff,y_diff,ssim\n0,0,0,\n1,0,0,\n2,0,0,\n");
  const auto with_ssim = evso("analyze --ssim " + at("s.y4m"));
  EXPECT_NE(with_ssim.out.find("0,0,0,1.000000"), std::string::npos);
}

TEST_F(Cli, AnalyzeRawInput) {
  ASSERT_EQ(evso("synth noise --width 32 --height 32 --frames 3 -o " + at("n.y4m")).status, 0);
  // Strip the Y4M framing to make a Y-only raw file.
  std::ifstream in(at("n.y4m"), std::ios::binary);
  std::string bytes{std::istreambuf_iterator<char>(in), {}};
  std::string raw;
  std::size_t pos = bytes.find('\n') + 1;
  while (pos < bytes.size()) {
    pos = bytes.find('\n', pos) + 1;
    raw += bytes.substr(pos, 32 * 32);
    pos += 32 * 32;
  }
  std::ofstream(at("n.yuv"), std::ios::binary) << raw;
  const auto a = evso("analyze " + at("n.y4m"));
  const auto b = evso("analyze --width 32 --height 32 --fps 30 --layout y " + at("n.yuv"));
  EXPECT_EQ(b.status, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_NE(evso("analyze " + at("n.yuv")).status, 0);
}

TEST_F(Cli, ErrorsExitNonzero) {
  ASSERT_EQ(evso("synth static --frames 1 -o " + at("one.y4m")).status, 0);
  EXPECT_NE(evso("analyze " + at("one.y4m")).status, 0);
  EXPECT_NE(evso("analyze " + at("missing.y4m")).status, 0);
  EXPECT_NE(evso("pipeline " + at("one.y4m")).status, 0);  // no --output-dir
  EXPECT_NE(evso("bogus").status, 0);
}

TEST_F(Cli, ConfigOverridesDefaults) {
  std::ofstream(at("cfg.json")) << R"({"theta": 100, "tau": [400, 1400, 2900, 5900]})";
  const auto shown = evso("--config " + at("cfg.json") + " --show-config");
  EXPECT_EQ(shown.status, 0);
  EXPECT_NE(shown.out.find("\"theta\": 100,"), std::string::npos);
  EXPECT_NE(shown.out.find("\"tau\": [400,1400,2900,5900],"), std::string::npos);
  EXPECT_NE(shown.out.find("\"alpha\": 3000,"), std::string::npos);
  std::ofstream(at("bad.json")) << R"({"gamma": 30})";
  EXPECT_NE(evso("--config " + at("bad.json") + " --show-config").status, 0);
}

TEST_F(Cli, PipelineIsReproducible) {
  ASSERT_EQ(evso("synth moving --width 64 --height 64 --frames 45 --velocity 8 -o " + at("m.y4m")).status, 0);
  ASSERT_EQ(evso("--output-dir " + at("a") + " pipeline " + at("m.y4m")).status, 0);
  ASSERT_EQ(evso("--output-dir " + at("b") + " pipeline " + at("m.y4m")).status, 0);
  const auto ta = tree(at("a")), tb = tree(at("b"));
  EXPECT_TRUE(ta.count("manifest.mpd"));
  EXPECT_TRUE(ta.count("medium/main/seg_00000.y4m"));
  EXPECT_EQ(ta, tb);
  const auto summary = evso("manifest " + at("a") + "/manifest.mpd");
  EXPECT_EQ(summary.status, 0);
  EXPECT_NE(summary.out.find("\"evso_level\": \"low\""), std::string::npos);
}

TEST_F(Cli, CorruptInputLeavesNoOutput) {
  std::ofstream(at("bad.y4m"), std::ios::binary) << "YUV4MPEG2 W16 H16 F30:1 Cmono\nFRAME\nxx";
  EXPECT_NE(evso("--output-dir " + at("out") + " pipeline " + at("bad.y4m")).status, 0);
  EXPECT_FALSE(fs::exists(at("out")));
}

TEST_F(Cli, ProcessWithSavedSchedule) {
  ASSERT_EQ(evso("synth static --frames 60 -o " + at("s.y4m")).status, 0);
  ASSERT_EQ(evso("--output-dir " + at("sched") + " schedule " + at("s.y4m")).status, 0);
  const auto r = evso("--output-dir " + at("p") + " process " + at("s.y4m") + " --schedule " + at("sched") +
                      "/schedule.json --profile evso_plus_plus --mode per-chunk");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"kept_counts\": [\n    26\n  ]"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(at("p") + "/evso_plus_plus/seg_00000.y4m"));
}

TEST_F(Cli, SimulateFromTrace) {
  ASSERT_EQ(evso("synth static --frames 40 -o " + at("s.y4m")).status, 0);
  ASSERT_EQ(evso("--output-dir " + at("out") + " pipeline " + at("s.y4m")).status, 0);
  std::ofstream(at("trace.csv")) << "segment_index,bandwidth_bps,battery_level\n0,5000000,medium\n";
  const auto r = evso("simulate " + at("out") + "/manifest.mpd --trace " + at("trace.csv"));
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("0,medium,5000000,medium,medium-main,"), std::string::npos) << r.out;
}
