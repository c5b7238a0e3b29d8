#include "evso/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "evso/error.hpp"

namespace evso {
namespace {

std::string_view window_mean_key(WindowMean mode) {
  return mode == WindowMean::DivideByK ? "divide_by_k" : "divide_by_k_minus_1";
}

template <std::size_t N>
std::array<double, N> read_array(const nlohmann::json& value, const char* key) {
  if (!value.is_array() || value.size() != N) {
    throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be an array of " + std::to_string(N) + " numbers");
  }
  std::array<double, N> out{};
  for (std::size_t i = 0; i < N; ++i) out[i] = value[i].get<double>();
  return out;
}

}  // namespace

nlohmann::ordered_json json_number(double value) {
  if (std::isfinite(value) && value == std::floor(value) && std::abs(value) < 9.0e15) {
    return static_cast<std::int64_t>(value);
  }
  return value;
}

void PipelineConfig::validate() const {
  similarity.validate();
  split.validate();
  schedule.validate();
}

nlohmann::ordered_json to_json(const PipelineConfig& config) {
  nlohmann::ordered_json j;
  j["theta"] = config.similarity.theta;
  j["alpha"] = json_number(config.split.alpha);
  j["beta"] = json_number(config.split.beta);
  j["k_window"] = config.split.k_window;
  j["window_mean"] = window_mean_key(config.split.window_mean);
  auto& tau = j["tau"] = nlohmann::ordered_json::array();
  for (double t : config.schedule.tau) tau.push_back(json_number(t));
  j["delta"] = json_number(config.schedule.delta);
  auto& profiles = j["profiles"] = nlohmann::ordered_json::object();
  for (const auto& p : config.schedule.profiles) {
    auto& s = profiles[std::string(profile_key(p.id))] = nlohmann::ordered_json::array();
    for (double v : p.s) s.push_back(json_number(v));
  }
  return j;
}

PipelineConfig apply_overrides(PipelineConfig base, const nlohmann::json& overrides) {
  if (!overrides.is_object()) throw Error(ErrorCode::InvalidArgument, "config must be a JSON object");
  static const std::set<std::string> known = {"theta", "alpha", "beta", "k_window", "window_mean",
                                              "tau",   "delta", "profiles"};
  try {
    for (const auto& [key, value] : overrides.items()) {
      if (!known.contains(key)) throw Error(ErrorCode::InvalidArgument, "unknown config key '" + key + "'");
    }
    if (overrides.contains("theta")) base.similarity.theta = overrides["theta"].get<std::int64_t>();
    if (overrides.contains("alpha")) base.split.alpha = overrides["alpha"].get<double>();
    if (overrides.contains("beta")) base.split.beta = overrides["beta"].get<double>();
    if (overrides.contains("k_window")) base.split.k_window = overrides["k_window"].get<int>();
    if (overrides.contains("window_mean")) {
      const auto mode = overrides["window_mean"].get<std::string>();
      if (mode == "divide_by_k") {
        base.split.window_mean = WindowMean::DivideByK;
      } else if (mode == "divide_by_k_minus_1") {
        base.split.window_mean = WindowMean::DivideByKMinusOne;
      } else {
        throw Error(ErrorCode::InvalidArgument, "window_mean must be divide_by_k or divide_by_k_minus_1");
      }
    }
    if (overrides.contains("tau")) base.schedule.tau = read_array<4>(overrides["tau"], "tau");
    if (overrides.contains("delta")) base.schedule.delta = overrides["delta"].get<double>();
    if (overrides.contains("profiles")) {
      const auto& profiles = overrides["profiles"];
      if (!profiles.is_object()) throw Error(ErrorCode::InvalidArgument, "profiles must be an object");
      for (const auto& [key, value] : profiles.items()) {
        const auto id = parse_profile(key);
        base.schedule.profiles[static_cast<std::size_t>(id)].s = read_array<5>(value, key.c_str());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("config value has the wrong type: ") + e.what());
  }
  base.validate();
  return base;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config is not valid JSON: " + std::string(e.what()));
  }
  return apply_overrides(PipelineConfig{}, j);
}

std::string show_config(const PipelineConfig& config) {
  // One key per line with compact values, so each constant is greppable.
  const auto j = to_json(config);
  std::string out = "{\n";
  std::size_t i = 0;
  for (const auto& [key, value] : j.items()) {
    out += "  \"" + key + "\": " + value.dump() + (++i < j.size() ? ",\n" : "\n");
  }
  return out + "}\n";
}

}  // namespace evso
