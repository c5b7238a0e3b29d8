#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace evso {

/// 8-bit luminance plane, row-major so a row is contiguous in memory like a
/// decoded Y plane. rows() is the frame height, cols() the width.
using LumaPlane = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kMacroblockSize = 16;

/// Frame geometry. The macroblock grid only counts full 16x16 blocks; pixels
/// in a partial right/bottom strip are outside the grid.
struct FrameDims {
  int width = 0;
  int height = 0;

  /// Throws InvalidDims unless both sides are at least one macroblock.
  void validate() const;

  int mb_cols() const noexcept { return width / kMacroblockSize; }
  int mb_rows() const noexcept { return height / kMacroblockSize; }
  int mb_count() const noexcept { return mb_cols() * mb_rows(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }

  friend bool operator==(const FrameDims&, const FrameDims&) = default;
};

/// Nominal frame rate as a reduced positive ratio (Y4M "F" field).
struct FrameRate {
  std::int64_t num = 30;
  std::int64_t den = 1;

  FrameRate() = default;
  FrameRate(std::int64_t n, std::int64_t d);

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

  /// Millisecond-precision rational approximation of a fractional rate.
  static FrameRate from_double(double fps);

  friend bool operator==(const FrameRate&, const FrameRate&) = default;
};

/// One decoded frame. The plane is shared and immutable, so copies are cheap
/// and repeated content (static scenes, held frames) costs one buffer.
class Frame {
 public:
  Frame(std::shared_ptr<const LumaPlane> plane, std::size_t index);
  Frame(LumaPlane plane, std::size_t index);

  FrameDims dims() const noexcept {
    return {static_cast<int>(plane_->cols()), static_cast<int>(plane_->rows())};
  }
  const LumaPlane& luma() const noexcept { return *plane_; }
  const std::shared_ptr<const LumaPlane>& plane_ptr() const noexcept { return plane_; }
  std::size_t index() const noexcept { return index_; }

  bool shares_plane_with(const Frame& other) const noexcept { return plane_ == other.plane_; }
  Frame with_index(std::size_t index) const { return Frame(plane_, index); }

 private:
  std::shared_ptr<const LumaPlane> plane_;
  std::size_t index_;
};

class FrameSequence {
 public:
  /// Checks that every frame matches dims and that indices run 0..n-1.
  FrameSequence(FrameDims dims, FrameRate fps, std::vector<Frame> frames, std::string source_label = {});

  const FrameDims& dims() const noexcept { return dims_; }
  const FrameRate& fps() const noexcept { return fps_; }
  const std::string& source_label() const noexcept { return label_; }

  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  std::span<const Frame> frames() const noexcept { return frames_; }
  auto begin() const noexcept { return frames_.begin(); }
  auto end() const noexcept { return frames_.end(); }

  /// Duration in seconds at the nominal rate.
  double duration() const noexcept { return static_cast<double>(size()) / fps_.value(); }

 private:
  FrameDims dims_;
  FrameRate fps_;
  std::vector<Frame> frames_;
  std::string label_;
};

/// Joins sequences end to end; all parts must share dims and rate.
FrameSequence concat(std::span<const FrameSequence> parts, std::string label = {});

}  // namespace evso
