#include "evso/empd.hpp"

#include <charconv>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "evso/error.hpp"

namespace evso {
namespace {

namespace pt = boost::property_tree;

constexpr std::string_view kMpdNamespace = "urn:mpeg:dash:schema:mpd:2011";
constexpr std::string_view kMpdProfile = "urn:mpeg:dash:profile:full:2011";

std::string format_seconds(double seconds) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), seconds);
  (void)ec;
  return "PT" + std::string(buf, ptr) + "S";
}

// ISO 8601 durations of the form P[nD]T[nH][nM][nS].
std::optional<double> parse_duration(std::string_view text) {
  if (text.empty() || text.front() != 'P') return std::nullopt;
  text.remove_prefix(1);
  double total = 0.0;
  bool in_time = false;
  while (!text.empty()) {
    if (text.front() == 'T') {
      in_time = true;
      text.remove_prefix(1);
      continue;
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr == text.data() + text.size()) return std::nullopt;
    const char unit = *ptr;
    text.remove_prefix(static_cast<std::size_t>(ptr - text.data()) + 1);
    if (!in_time && unit == 'D') {
      total += value * 86400.0;
    } else if (in_time && unit == 'H') {
      total += value * 3600.0;
    } else if (in_time && unit == 'M') {
      total += value * 60.0;
    } else if (in_time && unit == 'S') {
      total += value;
    } else {
      return std::nullopt;
    }
  }
  return total;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

class XmlWriter {
 public:
  void open(std::string_view name, std::initializer_list<std::pair<std::string_view, std::string>> attrs,
            bool empty = false) {
    indent();
    out_ << '<' << name;
    for (const auto& [key, value] : attrs) out_ << ' ' << key << "=\"" << escape(value) << '"';
    out_ << (empty ? "/>\n" : ">\n");
    if (!empty) ++depth_;
  }
  void close(std::string_view name) {
    --depth_;
    indent();
    out_ << "</" << name << ">\n";
  }
  std::string str() const { return out_.str(); }
  std::ostringstream& raw() { return out_; }

 private:
  void indent() {
    for (int i = 0; i < depth_; ++i) out_ << "  ";
  }
  std::ostringstream out_;
  int depth_ = 0;
};

std::optional<std::string> attr(const pt::ptree& node, const std::string& name) {
  if (auto attrs = node.get_child_optional("<xmlattr>")) {
    if (auto v = attrs->get_optional<std::string>(name)) return *v;
  }
  return std::nullopt;
}

template <typename T>
T numeric_attr(const pt::ptree& node, const std::string& name, T fallback) {
  const auto text = attr(node, name);
  if (!text) return fallback;
  T value{};
  auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), value);
  if (ec != std::errc() || ptr != text->data() + text->size()) {
    throw Error(ErrorCode::MalformedXml, "attribute " + name + " is not a number: '" + *text + "'");
  }
  return value;
}

std::optional<ContentType> content_type_of(std::string_view text) {
  if (text.rfind("video", 0) == 0) return ContentType::Video;
  if (text.rfind("audio", 0) == 0) return ContentType::Audio;
  return std::nullopt;
}

Representation parse_representation(const pt::ptree& node, const std::string& inherited_mime) {
  Representation rep;
  rep.id = attr(node, "id").value_or("");
  rep.bandwidth = numeric_attr<std::uint64_t>(node, "bandwidth", 0);
  rep.width = numeric_attr<int>(node, "width", 0);
  rep.height = numeric_attr<int>(node, "height", 0);
  rep.mime_type = attr(node, "mimeType").value_or(inherited_mime);
  for (const auto& [name, child] : node) {
    if (name == "SegmentList") {
      for (const auto& [seg_name, seg] : child) {
        if (seg_name == "SegmentURL") {
          if (auto media = attr(seg, "media")) rep.segment_urls.push_back(*media);
        }
      }
    }
  }
  if (rep.segment_urls.empty()) {
    // Single-file representation in plain DASH.
    if (auto base = node.get_optional<std::string>("BaseURL")) rep.segment_urls.push_back(*base);
  }
  return rep;
}

AdaptationSet parse_adaptation_set(const pt::ptree& node) {
  AdaptationSet set;
  const auto set_mime = attr(node, "mimeType").value_or("");
  for (const auto& [name, child] : node) {
    if (name == "Representation") set.representations.push_back(parse_representation(child, set_mime));
  }
  std::optional<ContentType> type;
  if (auto ct = attr(node, "contentType")) type = content_type_of(*ct);
  if (!type && !set_mime.empty()) type = content_type_of(set_mime);
  if (!type && !set.representations.empty()) type = content_type_of(set.representations.front().mime_type);
  set.content_type = type.value_or(ContentType::Video);

  const auto level_text = attr(node, "EVSOLevel");
  if (set.content_type == ContentType::Video) {
    if (level_text) {
      set.evso_level = parse_evso_level(*level_text);
      if (!set.evso_level) throw Error(ErrorCode::InvariantViolation, "unknown EVSOLevel '" + *level_text + "'");
    } else {
      set.evso_level = EvsoLevel::Baseline;
    }
  } else if (level_text) {
    throw Error(ErrorCode::InvariantViolation, "audio adaptation set carries EVSOLevel");
  }
  return set;
}

}  // namespace

std::string_view to_string(EvsoLevel level) noexcept {
  switch (level) {
    case EvsoLevel::Baseline: return "baseline";
    case EvsoLevel::High: return "high";
    case EvsoLevel::Medium: return "medium";
    case EvsoLevel::Low: return "low";
  }
  return "baseline";
}

std::optional<EvsoLevel> parse_evso_level(std::string_view text) noexcept {
  for (auto level : kAllLevels) {
    if (to_string(level) == text) return level;
  }
  return std::nullopt;
}

EvsoLevel level_for(ProfileId id) noexcept {
  switch (id) {
    case ProfileId::Evso: return EvsoLevel::High;
    case ProfileId::EvsoPlus: return EvsoLevel::Medium;
    case ProfileId::EvsoPlusPlus: return EvsoLevel::Low;
  }
  return EvsoLevel::High;
}

void EmpdManifest::validate() const {
  if (periods.empty()) throw Error(ErrorCode::InvariantViolation, "manifest has no periods");
  for (const auto& period : periods) {
    if (!(period.duration >= 0.0)) throw Error(ErrorCode::InvariantViolation, "negative period duration");
    std::set<EvsoLevel> seen;
    for (const auto& set : period.adaptation_sets) {
      if (set.representations.empty()) {
        throw Error(ErrorCode::InvariantViolation, "adaptation set without representations");
      }
      if (set.content_type == ContentType::Video) {
        if (!set.evso_level) throw Error(ErrorCode::InvariantViolation, "video set without EVSOLevel");
        if (!seen.insert(*set.evso_level).second) {
          throw Error(ErrorCode::InvariantViolation,
                      "duplicate video set for level " + std::string(to_string(*set.evso_level)));
        }
      } else if (set.evso_level) {
        throw Error(ErrorCode::InvariantViolation, "audio set carries an EVSOLevel");
      }
      for (const auto& rep : set.representations) {
        if (rep.bandwidth == 0) throw Error(ErrorCode::InvariantViolation, "representation '" + rep.id + "' has zero bandwidth");
        if (rep.segment_urls.empty()) {
          throw Error(ErrorCode::InvariantViolation, "representation '" + rep.id + "' has no segments");
        }
      }
    }
  }
}

double EmpdManifest::duration() const noexcept {
  double total = 0.0;
  for (const auto& p : periods) total += p.duration;
  return total;
}

std::string default_segment_name(EvsoLevel level, std::string_view variant_id, std::size_t chunk) {
  char index[16];
  std::snprintf(index, sizeof(index), "%05zu", chunk);
  return std::string(to_string(level)) + "/" + std::string(variant_id) + "/seg_" + index + ".y4m";
}

EmpdManifest build_manifest(std::span<const ManifestVariant> variants, double duration, const SegmentNaming& naming) {
  if (variants.empty()) throw Error(ErrorCode::NoVideoSets, "no variants to list");
  const auto chunks = variants.front().video.get().chunks.size();
  std::map<EvsoLevel, AdaptationSet> by_level;
  for (const auto& v : variants) {
    if (v.video.get().chunks.size() != chunks) {
      throw Error(ErrorCode::ChunkCountMismatch, "level " + std::string(to_string(v.level)) + " has " +
                                                     std::to_string(v.video.get().chunks.size()) + " chunks, expected " +
                                                     std::to_string(chunks));
    }
    auto& set = by_level[v.level];
    set.content_type = ContentType::Video;
    set.evso_level = v.level;
    Representation rep;
    rep.id = std::string(to_string(v.level)) + "-" + v.variant_id;
    rep.bandwidth = v.bandwidth;
    rep.width = v.dims.width;
    rep.height = v.dims.height;
    rep.mime_type = v.mime_type;
    for (std::size_t c = 0; c < chunks; ++c) rep.segment_urls.push_back(naming(v.level, v.variant_id, c));
    for (const auto& existing : set.representations) {
      if (existing.id == rep.id) throw Error(ErrorCode::InvariantViolation, "duplicate representation " + rep.id);
    }
    set.representations.push_back(std::move(rep));
  }
  Period period;
  period.duration = duration;
  for (auto& [level, set] : by_level) period.adaptation_sets.push_back(std::move(set));
  EmpdManifest manifest;
  manifest.periods.push_back(std::move(period));
  manifest.validate();
  return manifest;
}

std::string serialize_xml(const EmpdManifest& manifest) {
  manifest.validate();
  XmlWriter w;
  w.raw() << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  w.open("MPD", {{"xmlns", std::string(kMpdNamespace)},
                 {"profiles", std::string(kMpdProfile)},
                 {"type", "static"},
                 {"mediaPresentationDuration", format_seconds(manifest.duration())},
                 {"minBufferTime", "PT2S"}});
  for (std::size_t p = 0; p < manifest.periods.size(); ++p) {
    const auto& period = manifest.periods[p];
    w.open("Period", {{"id", std::to_string(p)}, {"duration", format_seconds(period.duration)}});
    for (std::size_t s = 0; s < period.adaptation_sets.size(); ++s) {
      const auto& set = period.adaptation_sets[s];
      if (set.content_type == ContentType::Video) {
        w.open("AdaptationSet", {{"id", std::to_string(s)},
                                 {"contentType", "video"},
                                 {"EVSOLevel", std::string(to_string(*set.evso_level))}});
      } else {
        w.open("AdaptationSet", {{"id", std::to_string(s)}, {"contentType", "audio"}});
      }
      for (const auto& rep : set.representations) {
        if (rep.width > 0 && rep.height > 0) {
          w.open("Representation", {{"id", rep.id},
                                    {"bandwidth", std::to_string(rep.bandwidth)},
                                    {"width", std::to_string(rep.width)},
                                    {"height", std::to_string(rep.height)},
                                    {"mimeType", rep.mime_type}});
        } else {
          w.open("Representation",
                 {{"id", rep.id}, {"bandwidth", std::to_string(rep.bandwidth)}, {"mimeType", rep.mime_type}});
        }
        w.open("SegmentList", {});
        for (const auto& url : rep.segment_urls) w.open("SegmentURL", {{"media", url}}, true);
        w.close("SegmentList");
        w.close("Representation");
      }
      w.close("AdaptationSet");
    }
    w.close("Period");
  }
  w.close("MPD");
  return w.str();
}

EmpdManifest parse_xml(std::string_view xml) {
  pt::ptree tree;
  try {
    std::istringstream in{std::string(xml)};
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorCode::MalformedXml, e.what());
  }
  const auto mpd = tree.get_child_optional("MPD");
  if (!mpd) throw Error(ErrorCode::MalformedXml, "document has no MPD root element");

  std::optional<double> presentation;
  if (auto text = attr(*mpd, "mediaPresentationDuration")) presentation = parse_duration(*text);

  EmpdManifest manifest;
  for (const auto& [name, node] : *mpd) {
    if (name != "Period") continue;
    Period period;
    if (auto text = attr(node, "duration")) {
      auto d = parse_duration(*text);
      if (!d) throw Error(ErrorCode::MalformedXml, "bad Period duration '" + *text + "'");
      period.duration = *d;
    }
    for (const auto& [child_name, child] : node) {
      if (child_name == "AdaptationSet") period.adaptation_sets.push_back(parse_adaptation_set(child));
    }
    manifest.periods.push_back(std::move(period));
  }
  // A lone period without duration spans the whole presentation.
  if (manifest.periods.size() == 1 && presentation && !attr(mpd->get_child("Period"), "duration")) {
    manifest.periods.front().duration = *presentation;
  }
  manifest.validate();
  return manifest;
}

}  // namespace evso
