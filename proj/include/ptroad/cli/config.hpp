#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "ptroad/road_fit.hpp"

namespace ptroad::cli {

struct PipelineConfig {
  DPConfig dp;
  bool normalize = true;
  std::optional<int> d_max;
  int n_thresholds = 256;
  double threshold = 0.9;

  void validate() const;
};

/// Recognized keys: lambda, tau_max, smoothness_sign, min_support, normalize,
/// d_max, n_thresholds, threshold, jump_direction ("down" | "up"),
/// refine_rows. Unknown keys are rejected.
PipelineConfig parse_config(const std::string& json_text);
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace ptroad::cli
