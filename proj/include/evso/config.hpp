#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "evso/fscheduler.hpp"
#include "evso/similarity.hpp"

namespace evso {

/// Every tunable of the pipeline. Defaults are the published constants.
struct PipelineConfig {
  SimilarityConfig similarity;
  SplitConfig split;
  ScheduleConfig schedule;

  void validate() const;
};

/// Flat JSON layout:
///   {"theta", "alpha", "beta", "k_window", "window_mean", "tau", "delta",
///    "profiles": {"evso": [s1..s5], "evso_plus": [...], "evso_plus_plus": [...]}}
/// Integral values are written without a fractional part.
nlohmann::ordered_json to_json(const PipelineConfig& config);

/// Overlays the keys present in `overrides` on `base`; unknown keys are rejected.
PipelineConfig apply_overrides(PipelineConfig base, const nlohmann::json& overrides);
PipelineConfig load_config(const std::filesystem::path& path);

/// Pretty-printed to_json of the defaults, as printed by --show-config.
std::string show_config(const PipelineConfig& config = {});

/// JSON number for a double, integral values as integers.
nlohmann::ordered_json json_number(double value);

}  // namespace evso
