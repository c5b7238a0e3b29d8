#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "evso/frame.hpp"

namespace evso {

struct SimilarityConfig {
  /// Per-macroblock SAD above which a block counts as changed.
  std::int64_t theta = 320;

  void validate() const;
};

struct PairDiff {
  std::int64_t m_diff = 0;
  std::int64_t y_diff = 0;
  std::optional<double> ssim;
};

/// Pairwise differences of a sequence; pairs[i] compares frames i and i+1.
struct DiffSeries {
  std::vector<PairDiff> pairs;
  FrameDims dims;
  FrameRate fps;
  std::int64_t theta = 320;

  std::size_t frame_count() const noexcept { return pairs.size() + 1; }
  std::vector<double> m_diff_values() const;
  std::vector<double> ssim_values() const;  ///< throws if any ssim is absent
};

/// Sum of absolute differences of two equally sized 8-bit blocks.
template <typename DerivedA, typename DerivedB>
std::int64_t sad(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return (a.template cast<std::int32_t>() - b.template cast<std::int32_t>()).cwiseAbs().template cast<std::int64_t>().sum();
}

/// SAD over the 16x16 macroblock at grid position (mb_row, mb_col).
std::int64_t sad_y_macroblock(const Frame& a, const Frame& b, int mb_row, int mb_col);

/// 1 iff the macroblock SAD strictly exceeds theta.
int d_y(const Frame& a, const Frame& b, int mb_row, int mb_col, std::int64_t theta);

/// Number of full macroblocks whose SAD exceeds theta.
std::int64_t m_diff(const Frame& a, const Frame& b, const SimilarityConfig& config = {});

/// Whole-plane luma SAD, partial edge strips included.
std::int64_t y_diff(const Frame& a, const Frame& b);

/// Mean SSIM over every 8x8 window position (stride 1) with unweighted
/// sample statistics, C1 = (0.01*255)^2 and C2 = (0.03*255)^2.
double ssim(const Frame& a, const Frame& b);
double ssim(const LumaPlane& a, const LumaPlane& b);

inline constexpr int kSsimWindow = 8;

DiffSeries diff_series(const FrameSequence& sequence, const SimilarityConfig& config = {}, bool with_ssim = false);

}  // namespace evso
