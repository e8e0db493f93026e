#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mespot/metrics.hpp"
#include "mespot/spotters.hpp"
#include "mespot/stfeatures.hpp"
#include "mespot/synth.hpp"

namespace mespot {

struct ToolkitConfig {
  SpotterConfig spotter;
  StFeatureConfig features;
  TrainConfig train;
  int negatives_per_positive = 5;
  std::uint64_t seed = 20240101;  // training-window sampling
  EvalConfig eval;
  FixtureConfig synth;
};

// Flat key=value text; `[section]` lines prefix the keys that follow, so
//   [spotter]
//   window_length = 35
// sets `spotter.window_length`. '#' starts a comment.

/// Every documented key with its current value, in a stable order.
std::string to_text(const ToolkitConfig& cfg);

std::vector<std::string> config_keys();

/// Sets one documented key ("section.key"). Throws ErrorKind::Configuration
/// for an unknown key or a value that does not parse.
void set_config_value(ToolkitConfig& cfg, std::string_view key, std::string_view value);

/// Applies "section.key=value".
void apply_override(ToolkitConfig& cfg, std::string_view assignment);

void apply_config_text(ToolkitConfig& cfg, std::string_view text, std::string_view source = "<config>");
ToolkitConfig load_config(const std::filesystem::path& path);

}  // namespace mespot
