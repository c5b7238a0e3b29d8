#include "evso/stream_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "evso/error.hpp"

namespace evso {
namespace {

int aggressiveness(EvsoLevel level) noexcept { return static_cast<int>(level); }

std::vector<EvsoLevel> fallback_order(EvsoLevel preferred) {
  std::vector<EvsoLevel> order;
  for (int a = aggressiveness(preferred); a >= 0; --a) order.push_back(static_cast<EvsoLevel>(a));
  for (int a = aggressiveness(preferred) + 1; a < static_cast<int>(kAllLevels.size()); ++a) {
    order.push_back(static_cast<EvsoLevel>(a));
  }
  return order;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
std::optional<T> parse_number(const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string_view to_string(BatteryState state) noexcept {
  switch (state) {
    case BatteryState::ChargingOrFull: return "charging";
    case BatteryState::High: return "high";
    case BatteryState::Medium: return "medium";
    case BatteryState::Low: return "low";
  }
  return "charging";
}

BatteryState parse_battery(std::string_view text) {
  if (text == "charging" || text == "full" || text == "charging_or_full") return BatteryState::ChargingOrFull;
  if (text == "high") return BatteryState::High;
  if (text == "medium") return BatteryState::Medium;
  if (text == "low") return BatteryState::Low;
  throw Error(ErrorCode::InvalidArgument, "unknown battery level '" + std::string(text) + "'");
}

EvsoLevel preferred_level(BatteryState state) noexcept {
  switch (state) {
    case BatteryState::ChargingOrFull: return EvsoLevel::Baseline;
    case BatteryState::High: return EvsoLevel::High;
    case BatteryState::Medium: return EvsoLevel::Medium;
    case BatteryState::Low: return EvsoLevel::Low;
  }
  return EvsoLevel::Baseline;
}

Selection select_representation(const EmpdManifest& manifest, const ClientState& state) {
  if (manifest.periods.empty()) throw Error(ErrorCode::NoVideoSets, "manifest has no periods");
  const auto& sets = manifest.periods.front().adaptation_sets;
  for (auto level : fallback_order(preferred_level(state.battery))) {
    for (std::size_t s = 0; s < sets.size(); ++s) {
      const auto& set = sets[s];
      if (set.content_type != ContentType::Video || set.evso_level != level || set.representations.empty()) continue;
      std::optional<std::size_t> best;
      std::size_t cheapest = 0;
      for (std::size_t r = 0; r < set.representations.size(); ++r) {
        const auto bw = set.representations[r].bandwidth;
        if (bw < set.representations[cheapest].bandwidth) cheapest = r;
        if (static_cast<double>(bw) <= state.bandwidth_bps &&
            (!best || bw > set.representations[*best].bandwidth)) {
          best = r;
        }
      }
      const auto pick = best.value_or(cheapest);
      const auto& rep = set.representations[pick];
      return Selection{s, pick, level, rep.id, rep.bandwidth};
    }
  }
  throw Error(ErrorCode::NoVideoSets, "manifest has no video adaptation sets");
}

std::size_t segment_count(const EmpdManifest& manifest) {
  std::optional<std::size_t> count;
  if (!manifest.periods.empty()) {
    for (const auto& set : manifest.periods.front().adaptation_sets) {
      if (set.content_type != ContentType::Video) continue;
      for (const auto& rep : set.representations) {
        count = std::min(count.value_or(std::numeric_limits<std::size_t>::max()), rep.segment_urls.size());
      }
    }
  }
  if (!count) throw Error(ErrorCode::NoVideoSets, "manifest has no video representations");
  return *count;
}

SessionLog simulate_session(const EmpdManifest& manifest, std::span<const double> bandwidth_trace,
                            std::span<const BatteryState> battery_trace) {
  if (bandwidth_trace.empty()) throw Error(ErrorCode::InvalidArgument, "bandwidth trace is empty");
  const auto segments = segment_count(manifest);
  SessionLog log;
  log.entries.reserve(segments);
  for (std::size_t i = 0; i < segments; ++i) {
    SessionEntry entry;
    entry.segment_index = i;
    entry.state.bandwidth_bps = bandwidth_trace[std::min(i, bandwidth_trace.size() - 1)];
    entry.state.battery =
        battery_trace.empty() ? BatteryState::ChargingOrFull : battery_trace[std::min(i, battery_trace.size() - 1)];
    entry.selection = select_representation(manifest, entry.state);
    const auto& rep = manifest.periods.front()
                          .adaptation_sets[entry.selection.set_index]
                          .representations[entry.selection.representation_index];
    entry.segment_url = rep.segment_urls[i];
    log.entries.push_back(std::move(entry));
  }
  return log;
}

Trace read_trace_csv(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  std::optional<bool> has_battery;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(content);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    const auto index = parse_number<std::size_t>(fields[0]);
    if (!index) {
      if (trace.bandwidth_bps.empty() && line_no == 1) continue;  // header row
      throw Error(ErrorCode::InvalidArgument, "trace line " + std::to_string(line_no) + ": bad segment index");
    }
    if (*index != trace.bandwidth_bps.size()) {
      throw Error(ErrorCode::InvalidArgument, "trace line " + std::to_string(line_no) + ": segments out of order");
    }
    if (fields.size() < 2 || fields.size() > 3) {
      throw Error(ErrorCode::InvalidArgument, "trace line " + std::to_string(line_no) + ": expected 2 or 3 columns");
    }
    const auto bw = parse_number<double>(fields[1]);
    if (!bw || !(*bw > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "trace line " + std::to_string(line_no) + ": bandwidth must be positive");
    }
    const bool battery_col = fields.size() == 3 && !fields[2].empty();
    if (has_battery && *has_battery != battery_col) {
      throw Error(ErrorCode::InvalidArgument, "trace line " + std::to_string(line_no) + ": inconsistent columns");
    }
    has_battery = battery_col;
    trace.bandwidth_bps.push_back(*bw);
    if (battery_col) trace.battery.push_back(parse_battery(fields[2]));
  }
  return trace;
}

void write_session_csv(std::ostream& out, const SessionLog& log) {
  out << "segment_index,battery,bandwidth_bps,level,representation_id,representation_bandwidth,segment_url\n";
  for (const auto& e : log.entries) {
    out << e.segment_index << ',' << to_string(e.state.battery) << ',' << std::llround(e.state.bandwidth_bps) << ','
        << to_string(e.selection.level) << ',' << e.selection.representation_id << ',' << e.selection.bandwidth << ','
        << e.segment_url << '\n';
  }
}

struct SegmentServer::Impl {
  httplib::Server server;
  std::thread worker;
  int port = 0;
};

SegmentServer::SegmentServer(std::filesystem::path content_dir, const std::string& host, int port)
    : impl_(std::make_unique<Impl>()) {
  if (!std::filesystem::is_regular_file(content_dir / "manifest.mpd")) {
    throw Error(ErrorCode::MissingManifest, "no manifest.mpd in " + content_dir.string());
  }
  if (!impl_->server.set_mount_point("/", content_dir.string())) {
    throw Error(ErrorCode::MissingManifest, "cannot serve " + content_dir.string());
  }
  // Default options add SO_REUSEPORT, which lets a second server share a busy port.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  impl_->server.Post(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 405; });
  impl_->server.Put(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 405; });
  impl_->server.Delete(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 405; });
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0) {
    throw Error(ErrorCode::BindFailure, "cannot bind " + host + ":" + std::to_string(port));
  }
}

SegmentServer::~SegmentServer() { stop(); }

int SegmentServer::port() const noexcept { return impl_->port; }

void SegmentServer::start() {
  if (impl_->worker.joinable()) return;
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void SegmentServer::run() { impl_->server.listen_after_bind(); }

void SegmentServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace evso
