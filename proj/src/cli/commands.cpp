#include "ptroad/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <future>
#include <iostream>
#include <map>
#include <thread>

#include "ptroad/eval_road.hpp"
#include "ptroad/netshape.hpp"
#include "ptroad/png_io.hpp"
#include "ptroad/tensor7.hpp"
#include "ptroad/vdisparity.hpp"
#include "ptroad/warp.hpp"

namespace ptroad::cli {

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateFit: return kExitDegenerate;
    case ErrorKind::NonRoadGeometry: return kExitNonRoad;
    case ErrorKind::UndefinedRecall: return kExitEval;
    default: return kExitUsage;
  }
}

namespace {

// Re-throws with the stage name prepended, keeping the kind.
template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(name) + ": " + e.what());
  }
}

std::string format_double(double x) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create " + dir.string() + ": " + ec.message());
}

std::string vdisparity_csv(const VDisparityMap& vd) {
  std::string out;
  for (int v = 0; v < vd.height(); ++v) {
    for (int d = 0; d < vd.d_bins(); ++d) {
      if (d) out += ',';
      out += format_double(vd.at(d, v));
    }
    out += '\n';
  }
  return out;
}

Bytes vdisparity_png(const VDisparityMap& vd) {
  RawPng raw{vd.d_bins(), vd.height(), 1, 8, {}};
  raw.samples.resize(vd.counts().size());
  const double peak = vd.max_value();
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    raw.samples[i] =
        peak > 0.0 ? static_cast<std::uint16_t>(std::lround(vd.counts()[i] * 255.0 / peak)) : 0;
  }
  return encode_png(raw);
}

// An all-invalid map has nothing to fit; report it like any other degenerate fit.
RoadModel fit_stage(const DisparityMap& disp, const PipelineConfig& cfg) {
  return stage("fit", [&] {
    try {
      return fit_road(disp, cfg.dp, cfg.d_max);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::EmptyInput) throw Error(ErrorKind::DegenerateFit, e.what());
      throw;
    }
  });
}

}  // namespace

void cmd_vdisp(const VdispArgs& args) {
  args.config.validate();
  const DisparityMap disp =
      stage("load disparity", [&] { return load_disparity_png16(read_file(args.disparity)); });
  // Nothing valid and no bin range given: one empty bin per row.
  std::optional<int> d_max = args.config.d_max;
  if (!d_max && disp.valid_count() == 0) {
    std::cerr << "vdisp: no valid disparities; writing a single empty bin per row\n";
    d_max = 0;
  }
  const VDisparityMap vd = stage("vdisp", [&] {
    return build_vdisparity(disp, d_max, args.config.normalize);
  });
  write_text_atomic(args.out_csv, vdisparity_csv(vd));
  write_file_atomic(args.out_png, vdisparity_png(vd));
}

RoadModel cmd_fit(const FitArgs& args) {
  args.config.validate();
  const DisparityMap disp =
      stage("load disparity", [&] { return load_disparity_png16(read_file(args.disparity)); });
  const RoadModel model = fit_stage(disp, args.config);
  write_text_atomic(args.out_model, road_model_to_json(model) + "\n");
  return model;
}

RoadModel cmd_pipeline(const PipelineArgs& args) {
  args.config.validate();
  const Image left = stage("load left", [&] { return load_image(read_file(args.left)); });
  const Image right = stage("load right", [&] { return load_image(read_file(args.right)); });
  const DisparityMap disp =
      stage("load disparity", [&] { return load_disparity_png16(read_file(args.disparity)); });
  if (left.width() != right.width() || left.height() != right.height() ||
      left.width() != disp.width() || left.height() != disp.height()) {
    throw Error(ErrorKind::Shape, "pipeline: left, right and disparity sizes differ");
  }
  if (left.channels() != 3 || right.channels() != 3) {
    throw Error(ErrorKind::Format, "pipeline: stereo images must be RGB");
  }

  const RoadModel model = fit_stage(disp, args.config);
  const WarpedImage warped =
      stage("transform", [&] { return transform_right_to_left(right, model); });

  const Image left_c = stage("crop", [&] { return crop_above_horizon(left, model.v_py); });
  const WarpedImage warped_c =
      stage("crop", [&] { return crop_above_horizon(warped, model.v_py); });
  const DisparityMap disp_c = stage("crop", [&] { return crop_above_horizon(disp, model.v_py); });

  const Tensor7 tensor = stage("assemble", [&] { return assemble(left_c, warped_c, disp_c); });

  ensure_dir(args.out_dir);
  write_file_atomic(args.out_dir / "frame.pt7", write_pt7(tensor, model));
  write_text_atomic(args.out_dir / "model.json", road_model_to_json(model) + "\n");
  write_file_atomic(args.out_dir / "left_cropped.png", encode_image_png8(left_c));
  write_file_atomic(args.out_dir / "right_warped.png", encode_image_png8(warped_c.image));
  write_file_atomic(args.out_dir / "right_valid.png", encode_mask_png1(warped_c.valid));
  return model;
}

void cmd_transform(const TransformArgs& args) {
  const Image right = stage("load right", [&] { return load_image(read_file(args.right)); });
  const Bytes text = stage("load model", [&] { return read_file(args.model); });
  const RoadModel model = stage("load model", [&] {
    return road_model_from_json(std::string(text.begin(), text.end()));
  });
  const WarpedImage warped =
      stage("transform", [&] { return transform_right_to_left(right, model); });
  write_file_atomic(args.out_png, encode_image_png8(warped.image));
  write_file_atomic(args.out_valid, encode_mask_png1(warped.valid));
}

int cmd_batch(const BatchArgs& args) {
  args.config.validate();
  if (!fs::is_directory(args.input_dir)) {
    throw Error(ErrorKind::Io, args.input_dir.string() + " is not a directory");
  }
  const std::string suffix = "_left.png";
  std::vector<std::string> stems;
  for (const auto& entry : fs::directory_iterator(args.input_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() && name.ends_with(suffix)) {
      stems.push_back(name.substr(0, name.size() - suffix.size()));
    }
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) {
    throw Error(ErrorKind::Io, "no <stem>_left.png files in " + args.input_dir.string());
  }

  const unsigned jobs =
      args.jobs ? args.jobs : std::max(1u, std::thread::hardware_concurrency());
  std::vector<int> codes(stems.size(), kExitOk);
  std::vector<std::string> messages(stems.size());

  auto run_one = [&](std::size_t i) {
    PipelineArgs p;
    p.left = args.input_dir / (stems[i] + "_left.png");
    p.right = args.input_dir / (stems[i] + "_right.png");
    p.disparity = args.input_dir / (stems[i] + "_disp.png");
    p.out_dir = args.out_dir / stems[i];
    p.config = args.config;
    try {
      cmd_pipeline(p);
    } catch (const Error& e) {
      codes[i] = exit_code_for(e.kind());
      messages[i] = e.what();
    } catch (const std::exception& e) {
      codes[i] = kExitUsage;
      messages[i] = e.what();
    }
  };

  for (std::size_t start = 0; start < stems.size(); start += jobs) {
    std::vector<std::future<void>> running;
    const std::size_t end = std::min(stems.size(), start + jobs);
    for (std::size_t i = start; i < end; ++i) {
      running.push_back(std::async(std::launch::async, run_one, i));
    }
    for (auto& f : running) f.get();
  }

  int first_failure = kExitOk;
  for (std::size_t i = 0; i < stems.size(); ++i) {
    if (codes[i] == kExitOk) {
      std::cerr << "batch: " << stems[i] << ": ok\n";
    } else {
      std::cerr << "batch: " << stems[i] << ": " << messages[i] << "\n";
      if (first_failure == kExitOk) first_failure = codes[i];
    }
  }
  return first_failure;
}

void cmd_eval(const EvalArgs& args) {
  args.config.validate();
  const ProbabilityMap prob =
      stage("load probability", [&] { return load_probability(read_file(args.prob)); });
  const Bytes gt_bytes = stage("load ground truth", [&] { return read_file(args.gt); });
  const RawPng gt_header = stage("load ground truth", [&] { return decode_png(gt_bytes); });

  BinaryMask gt;
  std::optional<BinaryMask> valid;
  if (gt_header.channels == 3) {
    KittiGroundTruth kitti = stage("load ground truth", [&] { return load_kitti_gt(gt_bytes); });
    gt = std::move(kitti.road);
    valid = std::move(kitti.valid);
  } else {
    gt = stage("load ground truth", [&] { return load_mask(gt_bytes); });
  }
  if (args.valid) {
    valid = stage("load validity mask", [&] { return load_mask(read_file(*args.valid)); });
  }

  const MetricReport report = stage("eval", [&] {
    return sweep(prob, gt, valid ? &*valid : nullptr, args.config.n_thresholds);
  });
  write_text_atomic(args.out_json, report_to_json(report) + "\n");
  if (args.out_csv) write_text_atomic(*args.out_csv, sweep_to_csv(report));
  if (args.out_mask) {
    write_file_atomic(*args.out_mask,
                      encode_mask_png8(net::threshold_probability(prob, args.config.threshold)));
  }
}

void cmd_synth(const SynthArgs& args) {
  const synth::Scene scene = stage("synth", [&] { return synth::generate(args.params); });
  ensure_dir(args.out_dir);
  write_file_atomic(args.out_dir / "left.png", encode_image_png8(scene.left));
  write_file_atomic(args.out_dir / "right.png", encode_image_png8(scene.right));
  write_file_atomic(args.out_dir / "disp.png", encode_disparity_png16_quantized(scene.disp));
  write_file_atomic(args.out_dir / "road_mask.png", encode_mask_png8(scene.road_mask));
  write_text_atomic(args.out_dir / "model.json", road_model_to_json(scene.model) + "\n");
}

std::string cmd_netshape(const NetshapeArgs& args) {
  if (args.format != "table" && args.format != "json" && args.format != "both") {
    throw Error(ErrorKind::Parameter, "--format must be table, json or both");
  }
  const net::ShapeTrace trace =
      net::trace_shapes(net::build_pt_resnet_spec(), args.height, args.width, 7);
  std::string out;
  if (args.format != "json") out += net::trace_to_table(trace);
  if (args.format != "table") out += net::trace_to_json(trace) + "\n";
  if (args.out_json) write_text_atomic(*args.out_json, net::trace_to_json(trace) + "\n");
  return out;
}

namespace {

// Flags that override the config file; unset flags leave it alone.
struct ConfigFlags {
  std::string config_path;
  std::optional<double> lambda;
  std::optional<int> tau_max;
  std::optional<int> smoothness_sign;
  std::optional<double> min_support;
  std::optional<int> d_max;
  std::optional<int> n_thresholds;
  std::optional<double> threshold;
  bool no_normalize = false;
  bool no_refine = false;
  std::optional<std::string> jump_direction;

  void add_dp(CLI::App* app) {
    app->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("--lambda", lambda, "DP jump penalty per row (>= 0)");
    app->add_option("--tau-max", tau_max, "largest row jump per disparity bin");
    app->add_option("--smoothness-sign", smoothness_sign, "+1 penalizes jumps, -1 rewards them");
    app->add_option("--min-support", min_support, "minimum path weight entering the fit");
    app->add_option("--d-max", d_max, "largest disparity bin (default: ceil of max disparity)");
    app->add_option("--jump-direction", jump_direction, "down (ground plane) or up (literal)");
    app->add_flag("--no-refine", no_refine, "fit the raw integer path rows");
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (lambda) cfg.dp.lambda = *lambda;
    if (tau_max) cfg.dp.tau_max = *tau_max;
    if (smoothness_sign) cfg.dp.smoothness_sign = *smoothness_sign;
    if (min_support) cfg.dp.min_support = *min_support;
    if (d_max) cfg.d_max = *d_max;
    if (n_thresholds) cfg.n_thresholds = *n_thresholds;
    if (threshold) cfg.threshold = *threshold;
    if (no_normalize) cfg.normalize = false;
    if (no_refine) cfg.dp.refine_rows = false;
    if (jump_direction) {
      if (*jump_direction == "down") cfg.dp.direction = JumpDirection::Downward;
      else if (*jump_direction == "up") cfg.dp.direction = JumpDirection::Upward;
      else throw Error(ErrorKind::Parameter, "--jump-direction must be down or up");
    }
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Stereo road preprocessing: v-disparity, road fit, perspective "
               "transform, 7-channel frames, evaluation"};
  app.name("ptroad");
  app.require_subcommand(1);

  ConfigFlags flags;
  VdispArgs vdisp;
  FitArgs fit;
  PipelineArgs pipe;
  TransformArgs transform;
  BatchArgs batch;
  EvalArgs eval;
  SynthArgs synth_args;
  NetshapeArgs shape;

  auto* vdisp_cmd = app.add_subcommand("vdisp", "build the v-disparity map of a disparity PNG");
  vdisp_cmd->add_option("--disparity", vdisp.disparity, "16-bit disparity PNG")->required();
  vdisp_cmd->add_option("--out-csv", vdisp.out_csv, "CSV output, one row per image row")->required();
  vdisp_cmd->add_option("--out-png", vdisp.out_png, "8-bit visualization")->required();
  vdisp_cmd->add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);
  vdisp_cmd->add_option("--d-max", flags.d_max, "largest disparity bin");
  vdisp_cmd->add_flag("--no-normalize", flags.no_normalize, "keep raw pixel counts");

  auto* fit_cmd = app.add_subcommand("fit", "fit the linear road model to a disparity PNG");
  fit_cmd->add_option("--disparity", fit.disparity, "16-bit disparity PNG")->required();
  fit_cmd->add_option("--out", fit.out_model, "road model JSON output")->required();
  flags.add_dp(fit_cmd);

  auto* pipe_cmd = app.add_subcommand("pipeline", "produce a 7-channel frame from a stereo triple");
  pipe_cmd->add_option("--left", pipe.left, "left RGB PNG")->required();
  pipe_cmd->add_option("--right", pipe.right, "right RGB PNG")->required();
  pipe_cmd->add_option("--disparity", pipe.disparity, "16-bit left disparity PNG")->required();
  pipe_cmd->add_option("--out-dir", pipe.out_dir, "output directory")->required();
  flags.add_dp(pipe_cmd);

  auto* transform_cmd =
      app.add_subcommand("transform", "render the right image from the left viewpoint");
  transform_cmd->add_option("--right", transform.right, "right PNG")->required();
  transform_cmd->add_option("--model", transform.model, "road model JSON from `fit`")->required();
  transform_cmd->add_option("--out", transform.out_png, "warped image PNG")->required();
  transform_cmd->add_option("--out-valid", transform.out_valid, "1-bit validity mask PNG")->required();

  auto* batch_cmd = app.add_subcommand("batch", "run the pipeline on every <stem>_{left,right,disp}.png");
  batch_cmd->add_option("--input-dir", batch.input_dir, "directory of stereo triples")->required();
  batch_cmd->add_option("--out-dir", batch.out_dir, "output root; one subdirectory per stem")->required();
  batch_cmd->add_option("--jobs", batch.jobs, "concurrent frames (0 = all cores)");
  flags.add_dp(batch_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "MaxF / AP / PRE / REC / FPR / FNR of a probability map");
  eval_cmd->add_option("--prob", eval.prob, "8- or 16-bit grayscale probability PNG")->required();
  eval_cmd->add_option("--gt", eval.gt, "ground truth: binary gray mask, or KITTI RGB")->required();
  eval_cmd->add_option("--valid", eval.valid, "validity mask (overrides KITTI validity)");
  eval_cmd->add_option("--out", eval.out_json, "metric report JSON")->required();
  eval_cmd->add_option("--csv", eval.out_csv, "full sweep CSV");
  eval_cmd->add_option("--mask-out", eval.out_mask, "binary mask PNG at --threshold");
  eval_cmd->add_option("--config", flags.config_path, "JSON config file")->check(CLI::ExistingFile);
  eval_cmd->add_option("--n-thresholds", flags.n_thresholds, "sweep resolution (>= 2)");
  eval_cmd->add_option("--threshold", flags.threshold, "mask threshold for --mask-out");

  auto* synth_cmd = app.add_subcommand("synth", "write a synthetic planar-road stereo scene");
  std::uint64_t seed = 1;
  int obstacles = 0;
  bool random_geometry = false;
  synth_cmd->add_option("--out-dir", synth_args.out_dir, "output directory")->required();
  synth_cmd->add_option("--seed", seed, "texture and geometry seed");
  synth_cmd->add_option("--width", synth_args.params.width, "image width");
  synth_cmd->add_option("--height", synth_args.params.height, "image height");
  synth_cmd->add_option("--alpha0", synth_args.params.alpha0, "road disparity intercept");
  synth_cmd->add_option("--alpha1", synth_args.params.alpha1, "road disparity per row");
  synth_cmd->add_option("--noise", synth_args.params.noise_sigma, "intensity noise sigma");
  synth_cmd->add_option("--obstacles", obstacles, "random obstacles (implies --random)");
  synth_cmd->add_flag("--random", random_geometry, "draw road geometry from the seed");

  auto* shape_cmd = app.add_subcommand("netshape", "print the network's per-stage shapes");
  shape_cmd->add_option("--height", shape.height, "input height")->required();
  shape_cmd->add_option("--width", shape.width, "input width")->required();
  shape_cmd->add_option("--format", shape.format, "table, json or both");
  shape_cmd->add_option("--json", shape.out_json, "also write the trace JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return kExitOk;
    }
    std::cerr << "ptroad: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*vdisp_cmd) {
      vdisp.config = flags.resolve();
      cmd_vdisp(vdisp);
    } else if (*fit_cmd) {
      fit.config = flags.resolve();
      const RoadModel m = cmd_fit(fit);
      std::cerr << "fit: alpha0=" << m.alpha0 << " alpha1=" << m.alpha1 << " v_py=" << m.v_py
                << " residual=" << m.fit_residual << "\n";
    } else if (*pipe_cmd) {
      pipe.config = flags.resolve();
      const RoadModel m = cmd_pipeline(pipe);
      std::cerr << "pipeline: v_py=" << m.v_py << " -> " << pipe.out_dir.string() << "\n";
    } else if (*transform_cmd) {
      cmd_transform(transform);
    } else if (*batch_cmd) {
      batch.config = flags.resolve();
      return cmd_batch(batch);
    } else if (*eval_cmd) {
      eval.config = flags.resolve();
      cmd_eval(eval);
    } else if (*synth_cmd) {
      if (random_geometry || obstacles > 0) {
        synth::DrawOptions opt;
        opt.width = synth_args.params.width;
        opt.height = synth_args.params.height;
        opt.obstacles = obstacles;
        opt.noise_sigma = synth_args.params.noise_sigma;
        synth_args.params = synth::draw_scene_params(seed, opt);
      }
      synth_args.params.texture_seed = seed;
      cmd_synth(synth_args);
    } else if (*shape_cmd) {
      std::cout << cmd_netshape(shape);
    }
  } catch (const Error& e) {
    std::cerr << "ptroad: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ptroad: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  for (const std::string& a : args) argv.push_back(a.c_str());
  argv.push_back(nullptr);
  return run_cli(static_cast<int>(args.size()), argv.data());
}

}  // namespace ptroad::cli
