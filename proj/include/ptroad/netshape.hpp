#pragma once

#include <string>
#include <vector>

#include "ptroad/core.hpp"

namespace ptroad::net {

enum class LayerKind {
  AtrousConv,
  Conv1x1,
  GlobalAvgPool,
  Concat,
  ResidualAdd,
  Upsample,
  BatchNorm,
  Relu,
};

const char* to_string(LayerKind kind) noexcept;

struct LayerSpec {
  LayerKind kind = LayerKind::Conv1x1;
  int kernel = 1;
  int stride = 1;
  int rate = 1;
  int padding = 0;
  int out_channels = 0;  // 0 = keep the input channel count

  /// rate >= 1, stride >= 1, kernel >= 1, padding >= 0; conv1x1 has kernel 1
  /// and rate 1.
  void validate() const;
};

/// BN -> ReLU -> atrous conv, added to a strided 1x1 projection of the block
/// input.
struct EncoderBlock {
  std::vector<LayerSpec> body;
  LayerSpec shortcut;
  bool residual_add = true;

  int stride() const noexcept;
};

enum class BranchKind { GlobalPool, Atrous, Conv1x1 };

struct HeadBranch {
  BranchKind kind = BranchKind::Conv1x1;
  int rate = 1;
  int out_channels = 256;
};

struct DecoderSpec {
  int skip_block = 2;         // 1-based encoder block feeding the skip connection
  int skip_channels = 48;     // 1x1 reduction applied to the skip features
  int classes = 1;
};

struct ArchitectureSpec {
  int input_channels = 7;
  std::vector<EncoderBlock> encoder;
  std::vector<HeadBranch> branches;
  int compress_channels = 256;
  DecoderSpec decoder;
  // Annotation only: the activation "parameter" read as a dropout
  // probability. Nothing in the trace depends on it.
  double relu_parameter = 0.5;
  double threshold = 0.9;

  /// Rates of the atrous head branches, in branch order.
  std::vector<int> branch_rates() const;
};

/// 7-channel input, 4 stride-2 residual blocks, a five-branch head (global
/// pooling, atrous 4 / 8 / 16, 1x1 conv), 1x1 compression, and a decoder that
/// joins block-2 features before upsampling to the input size.
ArchitectureSpec build_pt_resnet_spec();

/// Throws Parameter describing the first violated structural rule: 4 encoder
/// blocks of stride 2 with residual adds, 5 head branches with atrous rates
/// (4, 8, 16) and one global pooling branch, skip from block 2.
void validate(const ArchitectureSpec& spec);

/// floor((in + 2 * padding - rate * (kernel - 1) - 1) / stride) + 1; throws
/// Shape when the result is not positive and Parameter on illegal arguments.
int conv_out_extent(int in, int kernel, int stride, int rate, int padding);

struct Stage {
  std::string name;
  int height = 0;
  int width = 0;
  int channels = 0;

  bool operator==(const Stage&) const = default;
};

struct ShapeTrace {
  std::vector<Stage> stages;

  /// First stage with this exact name; throws Parameter if absent.
  const Stage& at(const std::string& name) const;
};

/// Throws Parameter for inputs smaller than 16 x 16 or a channel count that
/// differs from the architecture, and Shape naming the stage that collapses.
ShapeTrace trace_shapes(const ArchitectureSpec& spec, int height, int width, int channels = 7);

std::string trace_to_table(const ShapeTrace& trace);
std::string trace_to_json(const ShapeTrace& trace);

/// Strict: true where prob > t. Throws Parameter unless t is in [0, 1].
BinaryMask threshold_probability(const ProbabilityMap& prob, double t);

}  // namespace ptroad::net
