#include "ptroad/netshape.hpp"

#include <json.hpp>

#include <cstdio>
#include <sstream>

namespace ptroad::net {

const char* to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::AtrousConv: return "atrous_conv";
    case LayerKind::Conv1x1: return "conv1x1";
    case LayerKind::GlobalAvgPool: return "global_avg_pool";
    case LayerKind::Concat: return "concat";
    case LayerKind::ResidualAdd: return "residual_add";
    case LayerKind::Upsample: return "upsample";
    case LayerKind::BatchNorm: return "batch_norm";
    case LayerKind::Relu: return "relu";
  }
  return "unknown";
}

void LayerSpec::validate() const {
  if (kernel < 1) throw Error(ErrorKind::Parameter, "layer kernel must be >= 1");
  if (stride < 1) throw Error(ErrorKind::Parameter, "layer stride must be >= 1");
  if (rate < 1) throw Error(ErrorKind::Parameter, "layer rate must be >= 1");
  if (padding < 0) throw Error(ErrorKind::Parameter, "layer padding must be >= 0");
  if (out_channels < 0) throw Error(ErrorKind::Parameter, "layer channels must be >= 0");
  if (kind == LayerKind::Conv1x1 && (kernel != 1 || rate != 1)) {
    throw Error(ErrorKind::Parameter, "conv1x1 must have kernel 1 and rate 1");
  }
}

int EncoderBlock::stride() const noexcept {
  int s = 1;
  for (const LayerSpec& l : body) s *= l.stride;
  return s;
}

std::vector<int> ArchitectureSpec::branch_rates() const {
  std::vector<int> rates;
  for (const HeadBranch& b : branches) {
    if (b.kind == BranchKind::Atrous) rates.push_back(b.rate);
  }
  return rates;
}

ArchitectureSpec build_pt_resnet_spec() {
  ArchitectureSpec spec;
  const int channels[4] = {256, 512, 1024, 2048};
  for (int out : channels) {
    EncoderBlock block;
    block.body = {
        {LayerKind::BatchNorm, 1, 1, 1, 0, 0},
        {LayerKind::Relu, 1, 1, 1, 0, 0},
        {LayerKind::AtrousConv, 3, 2, 2, 2, out},
    };
    block.shortcut = {LayerKind::Conv1x1, 1, 2, 1, 0, out};
    spec.encoder.push_back(block);
  }
  spec.branches = {
      {BranchKind::GlobalPool, 1, 256},
      {BranchKind::Atrous, 4, 256},
      {BranchKind::Atrous, 8, 256},
      {BranchKind::Atrous, 16, 256},
      {BranchKind::Conv1x1, 1, 256},
  };
  return spec;
}

void validate(const ArchitectureSpec& spec) {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Parameter, "architecture: " + what); };

  if (spec.input_channels < 1) fail("input channel count must be positive");
  if (spec.encoder.size() != 4) {
    fail("expected 4 encoder blocks, got " + std::to_string(spec.encoder.size()));
  }
  for (std::size_t i = 0; i < spec.encoder.size(); ++i) {
    const EncoderBlock& b = spec.encoder[i];
    const std::string name = "block " + std::to_string(i + 1);
    for (const LayerSpec& l : b.body) l.validate();
    b.shortcut.validate();
    if (b.stride() != 2) fail(name + " has stride " + std::to_string(b.stride()) + ", expected 2");
    if (!b.residual_add) fail(name + " lacks its residual add");
    if (b.shortcut.stride != b.stride()) fail(name + " shortcut stride differs from its body");
    bool has_atrous = false;
    for (const LayerSpec& l : b.body) has_atrous |= l.kind == LayerKind::AtrousConv;
    if (!has_atrous) fail(name + " has no atrous convolution");
  }

  if (spec.branches.size() != 5) {
    fail("expected 5 head branches, got " + std::to_string(spec.branches.size()));
  }
  int pools = 0;
  for (const HeadBranch& b : spec.branches) {
    if (b.kind == BranchKind::GlobalPool) ++pools;
    if (b.out_channels < 1) fail("head branch channel count must be positive");
    if (b.rate < 1) fail("head branch rate must be >= 1");
  }
  if (pools != 1) fail("expected exactly one global pooling branch");
  if (spec.branch_rates() != std::vector<int>{4, 8, 16}) fail("atrous branch rates must be (4, 8, 16)");

  if (spec.decoder.skip_block != 2) {
    fail("decoder skip must come from block 2, got block " + std::to_string(spec.decoder.skip_block));
  }
  if (spec.decoder.skip_channels < 1 || spec.decoder.classes < 1 || spec.compress_channels < 1) {
    fail("decoder and compression channel counts must be positive");
  }
  if (!(spec.threshold >= 0.0 && spec.threshold <= 1.0)) fail("threshold must lie in [0, 1]");
}

int conv_out_extent(int in, int kernel, int stride, int rate, int padding) {
  if (in < 1 || kernel < 1 || stride < 1 || rate < 1 || padding < 0) {
    throw Error(ErrorKind::Parameter, "conv_out_extent: illegal arguments");
  }
  const long numerator = static_cast<long>(in) + 2L * padding - static_cast<long>(rate) * (kernel - 1) - 1;
  // Floor division; numerator may be negative.
  const long q = numerator >= 0 ? numerator / stride : -((-numerator + stride - 1) / stride);
  const long out = q + 1;
  if (out < 1) {
    throw Error(ErrorKind::Shape, "convolution output extent " + std::to_string(out) +
                                      " is not positive (in " + std::to_string(in) + ")");
  }
  return static_cast<int>(out);
}

const Stage& ShapeTrace::at(const std::string& name) const {
  for (const Stage& s : stages) {
    if (s.name == name) return s;
  }
  throw Error(ErrorKind::Parameter, "no stage named " + name);
}

ShapeTrace trace_shapes(const ArchitectureSpec& spec, int height, int width, int channels) {
  validate(spec);
  if (height < 16 || width < 16) {
    throw Error(ErrorKind::Parameter, "input must be at least 16 x 16");
  }
  if (channels != spec.input_channels) {
    throw Error(ErrorKind::Parameter, "input has " + std::to_string(channels) +
                                          " channels, architecture expects " +
                                          std::to_string(spec.input_channels));
  }

  ShapeTrace trace;
  Stage cur{"input", height, width, channels};
  trace.stages.push_back(cur);

  auto apply = [](const std::string& name, Stage in, const LayerSpec& l) {
    Stage out = in;
    out.name = name;
    try {
      if (l.kind == LayerKind::AtrousConv || l.kind == LayerKind::Conv1x1) {
        out.height = conv_out_extent(in.height, l.kernel, l.stride, l.rate, l.padding);
        out.width = conv_out_extent(in.width, l.kernel, l.stride, l.rate, l.padding);
      }
    } catch (const Error& e) {
      throw Error(e.kind(), name + ": " + e.what());
    }
    if (l.out_channels > 0) out.channels = l.out_channels;
    return out;
  };

  std::vector<Stage> block_out;
  for (std::size_t i = 0; i < spec.encoder.size(); ++i) {
    const EncoderBlock& b = spec.encoder[i];
    const std::string prefix = "block" + std::to_string(i + 1);
    const Stage block_in = cur;
    for (const LayerSpec& l : b.body) {
      cur = apply(prefix + "." + to_string(l.kind), cur, l);
      trace.stages.push_back(cur);
    }
    const Stage shortcut = apply(prefix + ".shortcut", block_in, b.shortcut);
    trace.stages.push_back(shortcut);
    if (shortcut.height != cur.height || shortcut.width != cur.width ||
        shortcut.channels != cur.channels) {
      throw Error(ErrorKind::Shape, prefix + ".residual_add: operand shapes differ");
    }
    cur.name = prefix + ".residual_add";
    trace.stages.push_back(cur);
    if (cur.height > block_in.height || cur.width > block_in.width) {
      throw Error(ErrorKind::Shape, prefix + ": spatial extent grew inside the encoder");
    }
    block_out.push_back(cur);
  }

  const Stage high = block_out.back();
  const int expect_h = (height + 15) / 16;
  const int expect_w = (width + 15) / 16;
  if (high.height != expect_h || high.width != expect_w) {
    throw Error(ErrorKind::Shape, "block4 is " + std::to_string(high.height) + "x" +
                                      std::to_string(high.width) +
                                      ", expected a 16x linear (256x area) reduction");
  }

  int concat_channels = 0;
  for (const HeadBranch& br : spec.branches) {
    Stage out;
    switch (br.kind) {
      case BranchKind::GlobalPool: {
        Stage pooled{"head.global_avg_pool", 1, 1, high.channels};
        trace.stages.push_back(pooled);
        trace.stages.push_back({"head.global_avg_pool.conv1x1", 1, 1, br.out_channels});
        out = {"head.global_avg_pool.broadcast", high.height, high.width, br.out_channels};
        break;
      }
      case BranchKind::Atrous:
        out = apply("head.atrous_rate" + std::to_string(br.rate), high,
                    {LayerKind::AtrousConv, 3, 1, br.rate, br.rate, br.out_channels});
        break;
      case BranchKind::Conv1x1:
        out = apply("head.conv1x1", high, {LayerKind::Conv1x1, 1, 1, 1, 0, br.out_channels});
        break;
    }
    if (out.height != high.height || out.width != high.width) {
      throw Error(ErrorKind::Shape, out.name + ": branch does not preserve the block4 extent");
    }
    trace.stages.push_back(out);
    concat_channels += out.channels;
  }
  trace.stages.push_back({"head.concat", high.height, high.width, concat_channels});
  Stage head = {"head.compress", high.height, high.width, spec.compress_channels};
  trace.stages.push_back(head);

  const Stage skip = block_out[static_cast<std::size_t>(spec.decoder.skip_block - 1)];
  trace.stages.push_back({"decoder.upsample", skip.height, skip.width, head.channels});
  trace.stages.push_back({"decoder.skip_conv1x1", skip.height, skip.width, spec.decoder.skip_channels});
  trace.stages.push_back(
      {"decoder.concat", skip.height, skip.width, head.channels + spec.decoder.skip_channels});
  trace.stages.push_back({"decoder.classifier", skip.height, skip.width, spec.decoder.classes});
  trace.stages.push_back({"decoder.upsample_to_input", height, width, spec.decoder.classes});
  trace.stages.push_back({"probability", height, width, spec.decoder.classes});
  return trace;
}

std::string trace_to_table(const ShapeTrace& trace) {
  std::ostringstream os;
  char line[128];
  std::snprintf(line, sizeof line, "%-34s %8s %8s %8s\n", "stage", "height", "width", "channels");
  os << line;
  for (const Stage& s : trace.stages) {
    std::snprintf(line, sizeof line, "%-34s %8d %8d %8d\n", s.name.c_str(), s.height, s.width,
                  s.channels);
    os << line;
  }
  return os.str();
}

std::string trace_to_json(const ShapeTrace& trace) {
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const Stage& s : trace.stages) {
    stages.push_back({{"name", s.name}, {"height", s.height}, {"width", s.width}, {"channels", s.channels}});
  }
  nlohmann::ordered_json j;
  j["stages"] = std::move(stages);
  return j.dump(2);
}

BinaryMask threshold_probability(const ProbabilityMap& prob, double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw Error(ErrorKind::Parameter, "threshold must lie in [0, 1]");
  }
  std::vector<bool> bits(prob.probs().size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = prob.probs()[i] > t;
  return BinaryMask(prob.width(), prob.height(), std::move(bits));
}

}  // namespace ptroad::net
