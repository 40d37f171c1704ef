#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ptroad/cli/config.hpp"
#include "ptroad/synth.hpp"

namespace ptroad::cli {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;       // usage, IO and format errors
inline constexpr int kExitDegenerate = 3;  // degenerate road fit
inline constexpr int kExitNonRoad = 4;     // alpha1 <= 0
inline constexpr int kExitEval = 5;        // invalid evaluation input

int exit_code_for(ErrorKind kind) noexcept;

namespace fs = std::filesystem;

struct VdispArgs {
  fs::path disparity;
  fs::path out_csv;
  fs::path out_png;
  PipelineConfig config;
};

struct FitArgs {
  fs::path disparity;
  fs::path out_model;
  PipelineConfig config;
};

struct PipelineArgs {
  fs::path left;
  fs::path right;
  fs::path disparity;
  fs::path out_dir;
  PipelineConfig config;
};

struct TransformArgs {
  fs::path right;
  fs::path model;  // road model JSON, as written by `fit`
  fs::path out_png;
  fs::path out_valid;  // 1-bit validity mask
};

struct BatchArgs {
  fs::path input_dir;
  fs::path out_dir;
  PipelineConfig config;
  unsigned jobs = 0;  // 0 = hardware concurrency
};

struct EvalArgs {
  fs::path prob;
  fs::path gt;
  std::optional<fs::path> valid;
  fs::path out_json;
  std::optional<fs::path> out_csv;
  std::optional<fs::path> out_mask;  // thresholded at config.threshold
  PipelineConfig config;
};

struct SynthArgs {
  fs::path out_dir;
  synth::SceneParams params;
};

struct NetshapeArgs {
  int height = 0;
  int width = 0;
  std::string format = "table";  // table | json | both
  std::optional<fs::path> out_json;
};

// Each command throws ptroad::Error on failure; run_cli maps it to an exit code.
void cmd_vdisp(const VdispArgs& args);
RoadModel cmd_fit(const FitArgs& args);
RoadModel cmd_pipeline(const PipelineArgs& args);
void cmd_transform(const TransformArgs& args);
/// Processes every <stem>_left.png / <stem>_right.png / <stem>_disp.png triple
/// into out_dir/<stem>/. Returns the exit code of the first failing stem, in
/// lexical order, or 0.
int cmd_batch(const BatchArgs& args);
void cmd_eval(const EvalArgs& args);
void cmd_synth(const SynthArgs& args);
std::string cmd_netshape(const NetshapeArgs& args);

/// Full command-line front end; returns the process exit code.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);

}  // namespace ptroad::cli
