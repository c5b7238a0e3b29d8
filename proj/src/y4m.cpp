#include "evso/y4m.hpp"

#include <fstream>
#include <sstream>

#include "evso/error.hpp"

namespace evso {

std::string y4m_header(FrameDims dims, FrameRate fps) {
  return "YUV4MPEG2 W" + std::to_string(dims.width) + " H" + std::to_string(dims.height) + " F" +
         std::to_string(fps.num) + ":" + std::to_string(fps.den) + " Ip A1:1 Cmono\n";
}

void write_y4m_frame(std::ostream& out, const LumaPlane& plane) {
  out << "FRAME\n";
  out.write(reinterpret_cast<const char*>(plane.data()), static_cast<std::streamsize>(plane.size()));
}

void write_y4m(std::ostream& out, const FrameSequence& sequence) {
  out << y4m_header(sequence.dims(), sequence.fps());
  for (const auto& frame : sequence) write_y4m_frame(out, frame.luma());
}

std::string to_y4m_bytes(const FrameSequence& sequence) {
  std::ostringstream out(std::ios::binary);
  write_y4m(out, sequence);
  return std::move(out).str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace evso
