#pragma once

#include "awarekit/probe.hpp"
#include "awarekit/tensor.hpp"

#include <Eigen/Core>

#include <memory>
#include <span>
#include <vector>

namespace awarekit {

struct BlockShape {
  Index in_channels = 0;
  Index out_channels = 0;
  bool operator==(const BlockShape&) const = default;
};

/// Architecture of a class-conditional generator built from CCBN blocks.
///
/// Block b normalizes its C_b = in_channels input at resolution 4 * 2^b, modulates it with
/// gamma/beta computed from concat(z, embedding[class]), applies ReLU, upsamples by 2 and convolves to
/// out_channels. A final 3x3 convolution and tanh produce the RGB image.
struct GeneratorSpec {
  static constexpr Index kInitialResolution = 4;
  static constexpr Index kOutputChannels = 3;

  Index num_classes = 0;
  Index latent_dim = 0;
  Index embedding_dim = 0;
  Index initial_channels = 0;
  std::vector<BlockShape> blocks;

  Index num_blocks() const { return static_cast<Index>(blocks.size()); }
  Index conditioning_dim() const { return latent_dim + embedding_dim; }
  /// Spatial size of the feature entering block b.
  Index block_resolution(Index b) const { return kInitialResolution << b; }
  Index output_resolution() const { return kInitialResolution << num_blocks(); }
  Index block_channels(Index b) const { return blocks.at(static_cast<std::size_t>(b)).in_channels; }
  Index total_channels() const;

  /// Throws ShapeError naming the violated invariant.
  void validate() const;
  bool operator==(const GeneratorSpec&) const = default;
};

struct BlockWeights {
  Tensor gamma_weight;  // C x (Dz + De)
  Eigen::VectorXf gamma_bias;
  Tensor beta_weight;  // C x (Dz + De)
  Eigen::VectorXf beta_bias;
  Tensor conv_weight;  // out x C x 3 x 3
  Eigen::VectorXf conv_bias;
};

struct GeneratorWeights {
  Tensor embedding;    // K x De
  Tensor stem_weight;  // (C0 * 16) x (Dz + De)
  Eigen::VectorXf stem_bias;
  std::vector<BlockWeights> blocks;
  Tensor output_weight;  // 3 x C_last x 3 x 3
  Eigen::VectorXf output_bias;

  /// Zero-initialized weights with shapes consistent with `spec`.
  static GeneratorWeights zeros(const GeneratorSpec& spec);
  void validate(const GeneratorSpec& spec) const;
};

/// Immutable generator; forward passes are const and may run concurrently.
class Generator {
 public:
  Generator(GeneratorSpec spec, GeneratorWeights weights);

  const GeneratorSpec& spec() const { return spec_; }
  const GeneratorWeights& weights() const { return weights_; }

 private:
  GeneratorSpec spec_;
  GeneratorWeights weights_;
};

struct ConditioningInput {
  Eigen::VectorXf z;
  Index class_id = 0;
};

struct Modulation {
  Eigen::VectorXf gamma;
  Eigen::VectorXf beta;
};

/// concat(z, embedding[class_id]); validates the class and latent length.
Eigen::VectorXf conditioning_vector(const Generator& g, const Eigen::VectorXf& z, Index class_id);

/// gamma = 1 + W_gamma c + b_gamma, beta = W_beta c + b_beta. Only the two affine maps run.
Modulation compute_modulation(const Generator& g, const Eigen::VectorXf& conditioning, Index block);
Modulation compute_modulation(const Generator& g, const ConditioningInput& cond, Index block);

/// y^c = gamma[c] * x^c + beta[c] on an already-normalized feature.
Tensor ccbn(const Tensor& x, const Eigen::VectorXf& gamma, const Eigen::VectorXf& beta);

enum class EditAction { zero, multiply, add, substitute };

/// One edit on the post-ReLU feature of a block. `donor` (substitute only) is a full C x H x W feature
/// of that block whose listed channels replace the current values.
struct ChannelEdit {
  Index block = 0;
  std::vector<Index> channels;
  EditAction action = EditAction::zero;
  float magnitude = 0.0f;
  std::shared_ptr<const Tensor> donor;
};

struct InterventionPlan {
  std::vector<ChannelEdit> edits;

  InterventionPlan& zero(Index block, std::vector<Index> channels);
  InterventionPlan& multiply(Index block, std::vector<Index> channels, float magnitude);
  InterventionPlan& add(Index block, std::vector<Index> channels, float magnitude);
  InterventionPlan& substitute(Index block, std::vector<Index> channels, std::shared_ptr<const Tensor> donor);

  bool empty() const { return edits.empty(); }
  bool touches(Index block) const;
  /// Throws bad_block / bad_channel / ShapeError.
  void validate(const GeneratorSpec& spec) const;
};

/// Applies the plan's edits for `block` in order.
void apply_edits(const InterventionPlan& plan, Index block, Tensor& post_relu);

struct BlockTrace {
  Index class_id = 0;
  Eigen::VectorXf conditioning;
  Eigen::VectorXf gamma;
  Eigen::VectorXf beta;
  Eigen::VectorXf probe;
  std::vector<GammaSign> gamma_sign;
  Tensor pre_norm;
  Tensor post_relu;  // after ReLU and this block's edits: the values that propagate
};

struct ForwardTrace {
  std::vector<BlockTrace> blocks;
};

struct ForwardResult {
  Tensor image;  // 3 x H' x W' in [-1, 1]
  ForwardTrace trace;
};

/// Per-block class schedule. Empty means every block (and the stem) uses cond.class_id; otherwise it
/// has one entry per block and the stem follows block 0.
using ClassSchedule = std::span<const Index>;

ForwardResult forward(const Generator& g, const ConditioningInput& cond, const InterventionPlan& plan = {},
                      ClassSchedule schedule = {});

/// Continues a forward pass from the post-ReLU (already edited) feature of `block`, returning the image.
/// Edits in `plan` for blocks after `block` are applied; edits for `block` itself are not.
Tensor resume_forward(const Generator& g, const ConditioningInput& cond, Index block, const Tensor& post_relu,
                      const InterventionPlan& plan = {}, ClassSchedule schedule = {});

/// Upsample and convolution of `block` applied to a post-ReLU feature.
Tensor block_convolution(const Generator& g, Index block, const Tensor& post_relu);

/// Continues from the convolution output of `block` (what block_convolution returns).
Tensor resume_from_convolution(const Generator& g, const ConditioningInput& cond, Index block, Tensor conv_output,
                               const InterventionPlan& plan = {}, ClassSchedule schedule = {});

}  // namespace awarekit
