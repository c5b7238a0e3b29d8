#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evso/empd.hpp"

namespace evso {

enum class BatteryState { ChargingOrFull, High, Medium, Low };

/// "charging", "high", "medium", "low".
std::string_view to_string(BatteryState state) noexcept;
BatteryState parse_battery(std::string_view text);

/// CHARGING_OR_FULL streams the unprocessed video; the other states map to
/// the level of the same name.
EvsoLevel preferred_level(BatteryState state) noexcept;

struct ClientState {
  BatteryState battery = BatteryState::ChargingOrFull;
  double bandwidth_bps = 0.0;
};

struct Selection {
  std::size_t set_index = 0;
  std::size_t representation_index = 0;
  EvsoLevel level = EvsoLevel::Baseline;
  std::string representation_id;
  std::uint64_t bandwidth = 0;
};

/// Picks the video set for the battery state, falling back to less
/// aggressive levels first and more aggressive ones after that. Within the
/// set, the highest bandwidth not above the client's wins; if none fits the
/// cheapest representation is used. Looks at the first period only.
Selection select_representation(const EmpdManifest& manifest, const ClientState& state);

struct SessionEntry {
  std::size_t segment_index = 0;
  ClientState state;
  Selection selection;
  std::string segment_url;
};

struct SessionLog {
  std::vector<SessionEntry> entries;
};

/// One decision per segment of the first period. Traces shorter than the
/// segment count hold their last value; an empty battery trace means
/// ChargingOrFull throughout.
SessionLog simulate_session(const EmpdManifest& manifest, std::span<const double> bandwidth_trace,
                            std::span<const BatteryState> battery_trace);

/// Segment count of the first period (the shortest video representation).
std::size_t segment_count(const EmpdManifest& manifest);

struct Trace {
  std::vector<double> bandwidth_bps;
  std::vector<BatteryState> battery;  ///< empty when the file had no battery column
};

/// CSV rows "segment_index,bandwidth_bps[,battery_level]", optional header.
/// Rows must be in segment order starting at 0.
Trace read_trace_csv(std::istream& in);

void write_session_csv(std::ostream& out, const SessionLog& log);

/// Static HTTP server for a directory holding manifest.mpd and its segments.
class SegmentServer {
 public:
  /// Throws MissingManifest if content_dir/manifest.mpd does not exist and
  /// BindFailure if the address cannot be bound. port 0 picks a free port.
  SegmentServer(std::filesystem::path content_dir, const std::string& host, int port);
  ~SegmentServer();

  SegmentServer(const SegmentServer&) = delete;
  SegmentServer& operator=(const SegmentServer&) = delete;

  int port() const noexcept;

  /// Serves on a background thread until stop() or destruction.
  void start();
  /// Serves on the calling thread until stop() is called from elsewhere.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evso
