#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evso/fscheduler.hpp"
#include "evso/vprocessor.hpp"

namespace evso {

/// Battery-oriented processing level of a video adaptation set. Baseline is
/// the unprocessed video; High, Medium and Low carry the EVSO, EVSO+ and
/// EVSO++ variants.
enum class EvsoLevel { Baseline, High, Medium, Low };
inline constexpr std::array<EvsoLevel, 4> kAllLevels = {EvsoLevel::Baseline, EvsoLevel::High, EvsoLevel::Medium,
                                                        EvsoLevel::Low};

/// Attribute vocabulary: "baseline", "high", "medium", "low".
std::string_view to_string(EvsoLevel level) noexcept;
std::optional<EvsoLevel> parse_evso_level(std::string_view text) noexcept;
EvsoLevel level_for(ProfileId id) noexcept;

enum class ContentType { Video, Audio };

struct Representation {
  std::string id;
  std::uint64_t bandwidth = 0;  ///< bits per second
  int width = 0;                ///< 0 when not applicable (audio)
  int height = 0;
  std::string mime_type;
  std::vector<std::string> segment_urls;

  friend bool operator==(const Representation&, const Representation&) = default;
};

struct AdaptationSet {
  ContentType content_type = ContentType::Video;
  std::optional<EvsoLevel> evso_level;  ///< set for video, absent for audio
  std::vector<Representation> representations;

  friend bool operator==(const AdaptationSet&, const AdaptationSet&) = default;
};

struct Period {
  double duration = 0.0;  ///< seconds
  std::vector<AdaptationSet> adaptation_sets;

  friend bool operator==(const Period&, const Period&) = default;
};

struct EmpdManifest {
  std::vector<Period> periods;

  /// Throws InvariantViolation on any structural rule violation.
  void validate() const;
  double duration() const noexcept;

  friend bool operator==(const EmpdManifest&, const EmpdManifest&) = default;
};

/// One processed rendition to list in the manifest.
struct ManifestVariant {
  EvsoLevel level = EvsoLevel::Baseline;
  std::string variant_id = "main";
  std::reference_wrapper<const ProcessedVideo> video;
  std::uint64_t bandwidth = 0;
  FrameDims dims;
  std::string mime_type = "video/x-y4m";
};

using SegmentNaming = std::function<std::string(EvsoLevel, std::string_view variant_id, std::size_t chunk)>;

/// "<level>/<variant>/seg_<chunk, 5 digits>.y4m"
std::string default_segment_name(EvsoLevel level, std::string_view variant_id, std::size_t chunk);

/// One period, one video set per level present (in Baseline, High, Medium,
/// Low order), one representation per variant, one segment per chunk.
EmpdManifest build_manifest(std::span<const ManifestVariant> variants, double duration,
                            const SegmentNaming& naming = default_segment_name);

std::string serialize_xml(const EmpdManifest& manifest);

/// Unknown elements and attributes are skipped. A video set without
/// EVSOLevel is read as Baseline, so plain DASH manifests load unchanged.
EmpdManifest parse_xml(std::string_view xml);

}  // namespace evso
