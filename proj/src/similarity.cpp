#include "evso/similarity.hpp"

#include <string>

#include "evso/error.hpp"

namespace evso {
namespace {

void require_same_dims(const Frame& a, const Frame& b) {
  if (a.dims() != b.dims()) throw Error(ErrorCode::DimsMismatch, "frames differ in dimensions");
}

void require_block(const FrameDims& dims, int mb_row, int mb_col) {
  if (mb_row < 0 || mb_col < 0 || mb_row >= dims.mb_rows() || mb_col >= dims.mb_cols()) {
    throw Error(ErrorCode::BlockOutOfRange, "macroblock (" + std::to_string(mb_row) + "," +
                                                std::to_string(mb_col) + ") outside the grid");
  }
}

template <typename PlaneA, typename PlaneB>
std::int64_t block_sad(const PlaneA& a, const PlaneB& b, int mb_row, int mb_col) {
  const int r = mb_row * kMacroblockSize;
  const int c = mb_col * kMacroblockSize;
  return sad(a.template block<kMacroblockSize, kMacroblockSize>(r, c),
             b.template block<kMacroblockSize, kMacroblockSize>(r, c));
}

std::int64_t count_changed_blocks(const LumaPlane& a, const LumaPlane& b, const FrameDims& dims,
                                  std::int64_t theta) {
  std::int64_t changed = 0;
  for (int r = 0; r < dims.mb_rows(); ++r) {
    for (int c = 0; c < dims.mb_cols(); ++c) {
      if (block_sad(a, b, r, c) > theta) ++changed;
    }
  }
  return changed;
}

// Column sums over a vertical run of kSsimWindow rows, slid down one row at a time.
struct ColumnSums {
  using Column = Eigen::Array<std::int64_t, Eigen::Dynamic, 1>;
  Column a, b, aa, bb, ab;

  explicit ColumnSums(Eigen::Index width)
      : a(Column::Zero(width)), b(Column::Zero(width)), aa(Column::Zero(width)),
        bb(Column::Zero(width)), ab(Column::Zero(width)) {}

  void add_row(const LumaPlane& pa, const LumaPlane& pb, Eigen::Index row, std::int64_t sign) {
    const auto ra = pa.row(row).transpose().cast<std::int64_t>().array();
    const auto rb = pb.row(row).transpose().cast<std::int64_t>().array();
    a += sign * ra;
    b += sign * rb;
    aa += sign * ra * ra;
    bb += sign * rb * rb;
    ab += sign * ra * rb;
  }
};

double window_ssim(std::int64_t sa, std::int64_t sb, std::int64_t saa, std::int64_t sbb, std::int64_t sab) {
  constexpr double n = kSsimWindow * kSsimWindow;
  constexpr double c1 = (0.01 * 255) * (0.01 * 255);
  constexpr double c2 = (0.03 * 255) * (0.03 * 255);
  // Exact integer numerators keep the result symmetric and exactly 1 for equal windows.
  constexpr std::int64_t ni = kSsimWindow * kSsimWindow;
  const auto var_a = static_cast<double>(ni * saa - sa * sa) / (n * (n - 1));
  const auto var_b = static_cast<double>(ni * sbb - sb * sb) / (n * (n - 1));
  const auto cov = static_cast<double>(ni * sab - sa * sb) / (n * (n - 1));
  const auto mean_ab = static_cast<double>(sa * sb) / (n * n);
  const auto mean_sq = static_cast<double>(sa * sa + sb * sb) / (n * n);
  return ((2.0 * mean_ab + c1) * (2.0 * cov + c2)) / ((mean_sq + c1) * (var_a + var_b + c2));
}

}  // namespace

void SimilarityConfig::validate() const {
  if (theta < 0) throw Error(ErrorCode::InvalidArgument, "theta must be non-negative");
}

std::vector<double> DiffSeries::m_diff_values() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(static_cast<double>(p.m_diff));
  return out;
}

std::vector<double> DiffSeries::ssim_values() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    if (!p.ssim) throw Error(ErrorCode::InvalidArgument, "diff series was computed without ssim");
    out.push_back(*p.ssim);
  }
  return out;
}

std::int64_t sad_y_macroblock(const Frame& a, const Frame& b, int mb_row, int mb_col) {
  require_same_dims(a, b);
  require_block(a.dims(), mb_row, mb_col);
  return block_sad(a.luma(), b.luma(), mb_row, mb_col);
}

int d_y(const Frame& a, const Frame& b, int mb_row, int mb_col, std::int64_t theta) {
  return sad_y_macroblock(a, b, mb_row, mb_col) > theta ? 1 : 0;
}

std::int64_t m_diff(const Frame& a, const Frame& b, const SimilarityConfig& config) {
  require_same_dims(a, b);
  config.validate();
  return count_changed_blocks(a.luma(), b.luma(), a.dims(), config.theta);
}

std::int64_t y_diff(const Frame& a, const Frame& b) {
  require_same_dims(a, b);
  return sad(a.luma(), b.luma());
}

double ssim(const LumaPlane& a, const LumaPlane& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::DimsMismatch, "planes differ in dimensions");
  }
  if (a.rows() < kSsimWindow || a.cols() < kSsimWindow) {
    throw Error(ErrorCode::FrameTooSmall, "plane smaller than the 8x8 SSIM window");
  }
  if (a.data() == b.data()) return 1.0;

  const Eigen::Index width = a.cols();
  const Eigen::Index positions_x = width - kSsimWindow + 1;
  const Eigen::Index positions_y = a.rows() - kSsimWindow + 1;
  ColumnSums cols(width);
  for (Eigen::Index r = 0; r < kSsimWindow; ++r) cols.add_row(a, b, r, 1);

  double total = 0.0;
  for (Eigen::Index y = 0; y < positions_y; ++y) {
    if (y > 0) {
      cols.add_row(a, b, y - 1, -1);
      cols.add_row(a, b, y + kSsimWindow - 1, 1);
    }
    std::int64_t sa = cols.a.head(kSsimWindow).sum();
    std::int64_t sb = cols.b.head(kSsimWindow).sum();
    std::int64_t saa = cols.aa.head(kSsimWindow).sum();
    std::int64_t sbb = cols.bb.head(kSsimWindow).sum();
    std::int64_t sab = cols.ab.head(kSsimWindow).sum();
    for (Eigen::Index x = 0; x < positions_x; ++x) {
      if (x > 0) {
        const auto out = x - 1;
        const auto in = x + kSsimWindow - 1;
        sa += cols.a[in] - cols.a[out];
        sb += cols.b[in] - cols.b[out];
        saa += cols.aa[in] - cols.aa[out];
        sbb += cols.bb[in] - cols.bb[out];
        sab += cols.ab[in] - cols.ab[out];
      }
      total += window_ssim(sa, sb, saa, sbb, sab);
    }
  }
  return total / static_cast<double>(positions_x * positions_y);
}

double ssim(const Frame& a, const Frame& b) {
  require_same_dims(a, b);
  return ssim(a.luma(), b.luma());
}

DiffSeries diff_series(const FrameSequence& sequence, const SimilarityConfig& config, bool with_ssim) {
  config.validate();
  if (sequence.size() < 2) throw Error(ErrorCode::TooFewFrames, "need at least 2 frames for a diff series");
  DiffSeries series;
  series.dims = sequence.dims();
  series.fps = sequence.fps();
  series.theta = config.theta;
  series.pairs.reserve(sequence.size() - 1);
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
    const auto& a = sequence[i];
    const auto& b = sequence[i + 1];
    PairDiff pair;
    pair.m_diff = count_changed_blocks(a.luma(), b.luma(), series.dims, config.theta);
    pair.y_diff = sad(a.luma(), b.luma());
    if (with_ssim) pair.ssim = ssim(a.luma(), b.luma());
    series.pairs.push_back(pair);
  }
  return series;
}

}  // namespace evso
