#include "evso/frame.hpp"

#include <cmath>
#include <numeric>

#include "evso/error.hpp"

namespace evso {

void FrameDims::validate() const {
  if (width < kMacroblockSize || height < kMacroblockSize) {
    throw Error(ErrorCode::InvalidDims, "frame must be at least 16x16, got " + std::to_string(width) +
                                            "x" + std::to_string(height));
  }
}

FrameRate::FrameRate(std::int64_t n, std::int64_t d) {
  if (n <= 0 || d <= 0) {
    throw Error(ErrorCode::InvalidRate,
                "frame rate must be positive, got " + std::to_string(n) + ":" + std::to_string(d));
  }
  const auto g = std::gcd(n, d);
  num = n / g;
  den = d / g;
}

FrameRate FrameRate::from_double(double fps) {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw Error(ErrorCode::InvalidRate, "frame rate must be positive and finite");
  }
  const auto n = static_cast<std::int64_t>(std::llround(fps * 1000.0));
  return FrameRate(n > 0 ? n : 1, 1000);
}

Frame::Frame(std::shared_ptr<const LumaPlane> plane, std::size_t index)
    : plane_(std::move(plane)), index_(index) {
  if (!plane_) throw Error(ErrorCode::InvalidArgument, "frame without a luma plane");
}

Frame::Frame(LumaPlane plane, std::size_t index)
    : Frame(std::make_shared<const LumaPlane>(std::move(plane)), index) {}

FrameSequence::FrameSequence(FrameDims dims, FrameRate fps, std::vector<Frame> frames, std::string source_label)
    : dims_(dims), fps_(fps), frames_(std::move(frames)), label_(std::move(source_label)) {
  dims_.validate();
  for (std::size_t i = 0; i < frames_.size(); ++i) {
    if (frames_[i].dims() != dims_) {
      throw Error(ErrorCode::DimsMismatch, "frame " + std::to_string(i) + " does not match sequence dims");
    }
    if (frames_[i].index() != i) {
      throw Error(ErrorCode::InvalidArgument, "frame indices must be consecutive from 0");
    }
  }
}

FrameSequence concat(std::span<const FrameSequence> parts, std::string label) {
  if (parts.empty()) throw Error(ErrorCode::InvalidArgument, "concat of zero sequences");
  const auto& first = parts.front();
  std::vector<Frame> frames;
  for (const auto& part : parts) {
    if (part.dims() != first.dims()) throw Error(ErrorCode::DimsMismatch, "concat parts differ in dims");
    if (part.fps() != first.fps()) throw Error(ErrorCode::InvalidRate, "concat parts differ in frame rate");
    for (const auto& f : part) frames.push_back(f.with_index(frames.size()));
  }
  return FrameSequence(first.dims(), first.fps(), std::move(frames), std::move(label));
}

}  // namespace evso
