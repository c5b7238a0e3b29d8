#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>

#include "evso/frame.hpp"

namespace evso {

// Decoded-luma ingestion. Only the Y plane is kept; chroma is read past.

/// Parses a YUV4MPEG2 stream. Accepts 4:2:0 (C420, C420jpeg, C420paldv,
/// C420mpeg2, or no C tag) and Cmono. Interlace, aspect and X tags are ignored.
FrameSequence read_y4m(std::istream& in, std::string source_label = "y4m");
FrameSequence read_y4m_file(const std::filesystem::path& path);

enum class RawLayout { I420, YOnly };

/// Headerless planar file with frames at a fixed stride.
FrameSequence read_raw_yuv(const std::filesystem::path& path, FrameDims dims, FrameRate fps, RawLayout layout);

/// Bytes per frame for a raw layout (W*H*3/2 for I420 with even dims).
std::size_t raw_frame_bytes(FrameDims dims, RawLayout layout) noexcept;

// Synthetic fixtures. All are pure functions of their arguments.

FrameSequence synth_static(FrameDims dims, std::size_t count, int luma_value, FrameRate fps);

/// A block_edge x block_edge square of fg_luma over bg_luma. The square sits
/// at the vertically centred row snapped down to the macroblock grid, starts
/// at x = 0 and moves velocity px per frame, reflecting off the left and
/// right borders so it never leaves the frame.
FrameSequence synth_moving_block(FrameDims dims, std::size_t count, int block_edge, int velocity_px_per_frame,
                                 int fg_luma, int bg_luma, FrameRate fps);

/// Uniform noise around mid-grey. Generator: one std::mt19937 (32-bit
/// Mersenne Twister, default parameters) seeded with `seed`; pixels are drawn
/// in frame order then row-major order as
///   y = 128 - (amplitude + 1) / 2 + (mt() % (amplitude + 1))
/// using integer arithmetic. amplitude 0 yields constant 128 frames.
FrameSequence synth_noise(FrameDims dims, std::size_t count, std::uint32_t seed, int amplitude, FrameRate fps);

}  // namespace evso
