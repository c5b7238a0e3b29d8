#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "evso/frame.hpp"

namespace evso {

// Writers emit monochrome (Cmono) YUV4MPEG2 since only luma is carried.

std::string y4m_header(FrameDims dims, FrameRate fps);
void write_y4m_frame(std::ostream& out, const LumaPlane& plane);
void write_y4m(std::ostream& out, const FrameSequence& sequence);
std::string to_y4m_bytes(const FrameSequence& sequence);

/// Writes bytes to path, throwing IoError on failure.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace evso
