#include "ptroad/cli/config.hpp"

#include <json.hpp>

#include "ptroad/png_io.hpp"

namespace ptroad::cli {

void PipelineConfig::validate() const {
  dp.validate();
  if (d_max && *d_max < 0) throw Error(ErrorKind::Parameter, "d_max must be >= 0");
  if (n_thresholds < 2) throw Error(ErrorKind::Parameter, "n_thresholds must be >= 2");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorKind::Parameter, "threshold must lie in [0, 1]");
  }
}

PipelineConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Format, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Format, "config: top level must be an object");

  PipelineConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "lambda") cfg.dp.lambda = value.get<double>();
      else if (key == "tau_max") cfg.dp.tau_max = value.get<int>();
      else if (key == "smoothness_sign") cfg.dp.smoothness_sign = value.get<int>();
      else if (key == "min_support") cfg.dp.min_support = value.get<double>();
      else if (key == "normalize") cfg.normalize = value.get<bool>();
      else if (key == "d_max") {
        if (value.is_null()) cfg.d_max.reset();
        else cfg.d_max = value.get<int>();
      } else if (key == "n_thresholds") cfg.n_thresholds = value.get<int>();
      else if (key == "threshold") cfg.threshold = value.get<double>();
      else if (key == "refine_rows") cfg.dp.refine_rows = value.get<bool>();
      else if (key == "jump_direction") {
        const auto dir = value.get<std::string>();
        if (dir == "down") cfg.dp.direction = JumpDirection::Downward;
        else if (dir == "up") cfg.dp.direction = JumpDirection::Upward;
        else throw Error(ErrorKind::Parameter, "config: jump_direction must be \"down\" or \"up\"");
      } else {
        throw Error(ErrorKind::Format, "config: unknown key \"" + key + "\"");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Format, std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const Bytes bytes = read_file(path);
  return parse_config(std::string(bytes.begin(), bytes.end()));
}

}  // namespace ptroad::cli
