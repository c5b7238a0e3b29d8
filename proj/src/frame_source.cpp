#include "evso/frame_source.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string_view>
#include <vector>

#include "evso/error.hpp"

namespace evso {
namespace {

constexpr std::size_t kMaxHeaderLine = 4096;

enum class ChromaFormat { Yuv420, Mono };

struct Y4mHeader {
  FrameDims dims;
  FrameRate fps;
  ChromaFormat chroma = ChromaFormat::Yuv420;
};

std::size_t chroma_bytes(FrameDims dims, ChromaFormat chroma) {
  if (chroma == ChromaFormat::Mono) return 0;
  const auto cw = static_cast<std::size_t>((dims.width + 1) / 2);
  const auto ch = static_cast<std::size_t>((dims.height + 1) / 2);
  return 2 * cw * ch;
}

// Reads up to and including '\n'. Returns nullopt on clean EOF before any byte.
std::optional<std::string> read_line(std::istream& in, ErrorCode on_overflow) {
  std::string line;
  char c = 0;
  while (in.get(c)) {
    if (c == '\n') return line;
    line.push_back(c);
    if (line.size() > kMaxHeaderLine) throw Error(on_overflow, "header line too long");
  }
  if (line.empty()) return std::nullopt;
  return line;  // unterminated; caller decides
}

std::int64_t parse_int(std::string_view text, std::string_view what) {
  std::int64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::MalformedHeader, "bad " + std::string(what) + " value '" + std::string(text) + "'");
  }
  return value;
}

Y4mHeader parse_header(std::istream& in) {
  auto line = read_line(in, ErrorCode::MalformedHeader);
  if (!line) throw Error(ErrorCode::MalformedHeader, "empty stream");
  std::istringstream tokens(*line);
  std::string token;
  tokens >> token;
  if (token != "YUV4MPEG2") throw Error(ErrorCode::MalformedHeader, "missing YUV4MPEG2 signature");

  std::optional<std::int64_t> width, height;
  std::optional<FrameRate> fps;
  Y4mHeader header;
  while (tokens >> token) {
    const char tag = token[0];
    const std::string_view value = std::string_view(token).substr(1);
    switch (tag) {
      case 'W': width = parse_int(value, "W"); break;
      case 'H': height = parse_int(value, "H"); break;
      case 'F': {
        const auto colon = value.find(':');
        if (colon == std::string_view::npos) throw Error(ErrorCode::MalformedHeader, "F tag without ratio");
        const auto n = parse_int(value.substr(0, colon), "F");
        const auto d = parse_int(value.substr(colon + 1), "F");
        if (n <= 0 || d <= 0) throw Error(ErrorCode::MalformedHeader, "non-positive frame rate");
        fps = FrameRate(n, d);
        break;
      }
      case 'C':
        if (value == "420" || value == "420jpeg" || value == "420paldv" || value == "420mpeg2") {
          header.chroma = ChromaFormat::Yuv420;
        } else if (value == "mono") {
          header.chroma = ChromaFormat::Mono;
        } else {
          throw Error(ErrorCode::UnsupportedColorSpace, "color space C" + std::string(value));
        }
        break;
      default:
        break;  // I, A, X and unknown tags
    }
  }
  if (!width || !height || !fps) throw Error(ErrorCode::MalformedHeader, "missing W, H or F tag");
  if (*width <= 0 || *height <= 0 || *width > 65536 || *height > 65536) {
    throw Error(ErrorCode::MalformedHeader, "implausible frame size");
  }
  header.dims = {static_cast<int>(*width), static_cast<int>(*height)};
  header.dims.validate();
  header.fps = *fps;
  return header;
}

LumaPlane read_plane(std::istream& in, FrameDims dims) {
  LumaPlane plane(dims.height, dims.width);
  in.read(reinterpret_cast<char*>(plane.data()), static_cast<std::streamsize>(dims.pixel_count()));
  if (static_cast<std::size_t>(in.gcount()) != dims.pixel_count()) {
    throw Error(ErrorCode::TruncatedFrame, "luma payload shorter than expected");
  }
  return plane;
}

void skip_bytes(std::istream& in, std::size_t n) {
  if (n == 0) return;
  in.ignore(static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw Error(ErrorCode::TruncatedFrame, "chroma payload shorter than expected");
  }
}

}  // namespace

FrameSequence read_y4m(std::istream& in, std::string source_label) {
  const auto header = parse_header(in);
  const auto skip = chroma_bytes(header.dims, header.chroma);
  std::vector<Frame> frames;
  while (true) {
    auto marker = read_line(in, ErrorCode::TruncatedFrame);
    if (!marker) break;
    if (marker->rfind("FRAME", 0) != 0) {
      throw Error(ErrorCode::TruncatedFrame, "expected FRAME marker at frame " + std::to_string(frames.size()));
    }
    if (in.eof()) throw Error(ErrorCode::TruncatedFrame, "FRAME marker without payload");
    frames.emplace_back(read_plane(in, header.dims), frames.size());
    skip_bytes(in, skip);
  }
  return FrameSequence(header.dims, header.fps, std::move(frames), std::move(source_label));
}

FrameSequence read_y4m_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return read_y4m(in, path.filename().string());
}

std::size_t raw_frame_bytes(FrameDims dims, RawLayout layout) noexcept {
  return dims.pixel_count() + (layout == RawLayout::I420 ? chroma_bytes(dims, ChromaFormat::Yuv420) : 0);
}

FrameSequence read_raw_yuv(const std::filesystem::path& path, FrameDims dims, FrameRate fps, RawLayout layout) {
  dims.validate();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot stat " + path.string());
  const auto stride = raw_frame_bytes(dims, layout);
  if (size % stride != 0) {
    throw Error(ErrorCode::SizeMismatch, "file size " + std::to_string(size) + " is not a multiple of frame size " +
                                             std::to_string(stride));
  }
  const auto count = size / stride;
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    frames.emplace_back(read_plane(in, dims), i);
    skip_bytes(in, stride - dims.pixel_count());
  }
  return FrameSequence(dims, fps, std::move(frames), path.filename().string());
}

namespace {

void check_luma(int value, const char* what) {
  if (value < 0 || value > 255) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be in [0,255]");
  }
}

}  // namespace

FrameSequence synth_static(FrameDims dims, std::size_t count, int luma_value, FrameRate fps) {
  dims.validate();
  check_luma(luma_value, "luma_value");
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "count must be at least 1");
  auto plane = std::make_shared<const LumaPlane>(
      LumaPlane::Constant(dims.height, dims.width, static_cast<std::uint8_t>(luma_value)));
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) frames.emplace_back(plane, i);
  return FrameSequence(dims, fps, std::move(frames), "static");
}

FrameSequence synth_moving_block(FrameDims dims, std::size_t count, int block_edge, int velocity_px_per_frame,
                                 int fg_luma, int bg_luma, FrameRate fps) {
  dims.validate();
  check_luma(fg_luma, "fg_luma");
  check_luma(bg_luma, "bg_luma");
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "count must be at least 1");
  if (block_edge <= 0 || block_edge > dims.width || block_edge > dims.height) {
    throw Error(ErrorCode::BlockTooLarge, "block of edge " + std::to_string(block_edge) + " does not fit");
  }
  if (velocity_px_per_frame < 0) throw Error(ErrorCode::InvalidArgument, "velocity must be non-negative");

  const int top = ((dims.height - block_edge) / 2) / kMacroblockSize * kMacroblockSize;
  const std::int64_t travel = dims.width - block_edge;
  auto position = [&](std::size_t k) -> int {
    if (travel == 0) return 0;
    const std::int64_t period = 2 * travel;
    const std::int64_t phase = (static_cast<std::int64_t>(k) * velocity_px_per_frame) % period;
    return static_cast<int>(phase <= travel ? phase : period - phase);
  };

  // Positions repeat under reflection; share a plane per distinct x.
  std::map<int, std::shared_ptr<const LumaPlane>> planes;
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const int x = position(k);
    auto& plane = planes[x];
    if (!plane) {
      LumaPlane p = LumaPlane::Constant(dims.height, dims.width, static_cast<std::uint8_t>(bg_luma));
      p.block(top, x, block_edge, block_edge).setConstant(static_cast<std::uint8_t>(fg_luma));
      plane = std::make_shared<const LumaPlane>(std::move(p));
    }
    frames.emplace_back(plane, k);
  }
  return FrameSequence(dims, fps, std::move(frames), "moving_block");
}

FrameSequence synth_noise(FrameDims dims, std::size_t count, std::uint32_t seed, int amplitude, FrameRate fps) {
  dims.validate();
  check_luma(amplitude, "amplitude");
  if (count == 0) throw Error(ErrorCode::InvalidArgument, "count must be at least 1");
  std::mt19937 engine(seed);
  const auto span = static_cast<std::uint32_t>(amplitude) + 1;
  const auto base = 128 - static_cast<int>(span / 2);
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    LumaPlane plane(dims.height, dims.width);
    auto* px = plane.data();
    for (std::size_t i = 0; i < dims.pixel_count(); ++i) {
      px[i] = static_cast<std::uint8_t>(base + static_cast<int>(engine() % span));
    }
    frames.emplace_back(std::move(plane), k);
  }
  return FrameSequence(dims, fps, std::move(frames), "noise");
}

}  // namespace evso
