#include "awarekit/generator.hpp"

#include "awarekit/error.hpp"

#include <string>

namespace awarekit {

namespace {

std::string idx(Index i) { return std::to_string(i); }

void expect_shape(const Tensor& t, const std::vector<Index>& shape, const std::string& name) {
  if (t.shape() != shape) throw ShapeError("weights: tensor '" + name + "' has inconsistent shape");
  if (!t.all_finite()) throw ShapeError("weights: tensor '" + name + "' contains non-finite values");
}

void expect_vector(const Eigen::VectorXf& v, Index n, const std::string& name) {
  if (v.size() != n) throw ShapeError("weights: vector '" + name + "' has inconsistent length");
  if (!v.allFinite()) throw ShapeError("weights: vector '" + name + "' contains non-finite values");
}

Index class_for_block(const ConditioningInput& cond, ClassSchedule schedule, Index block) {
  return schedule.empty() ? cond.class_id : schedule[static_cast<std::size_t>(block)];
}

void check_schedule(const Generator& g, ClassSchedule schedule) {
  if (schedule.empty()) return;
  if (static_cast<Index>(schedule.size()) != g.spec().num_blocks()) {
    throw bad_param("class schedule needs one class per block");
  }
  for (Index c : schedule) {
    if (c < 0 || c >= g.spec().num_classes) throw bad_class("class " + idx(c) + " out of range");
  }
}

Tensor stem_feature(const Generator& g, const Eigen::VectorXf& conditioning) {
  const auto& s = g.spec();
  const Eigen::VectorXf flat = dense(conditioning, g.weights().stem_weight, g.weights().stem_bias);
  return Tensor({s.initial_channels, GeneratorSpec::kInitialResolution, GeneratorSpec::kInitialResolution}, flat);
}

// Normalize, modulate and rectify the input of block b.
Tensor modulated_relu(const Tensor& x, const Modulation& m) {
  return activate(ccbn(spatial_normalize(x).first, m.gamma, m.beta), Activation::relu);
}

Tensor block_output(const Generator& g, Index b, const Tensor& post_relu) {
  const auto& w = g.weights().blocks[static_cast<std::size_t>(b)];
  return conv2d(upsample_nearest(post_relu, 2), w.conv_weight, w.conv_bias);
}

Tensor render(const Generator& g, const Tensor& last) {
  return activate(conv2d(last, g.weights().output_weight, g.weights().output_bias), Activation::tanh);
}

}  // namespace

Index GeneratorSpec::total_channels() const {
  Index total = 0;
  for (const auto& b : blocks) total += b.in_channels;
  return total;
}

void GeneratorSpec::validate() const {
  if (num_classes < 2) throw ShapeError("spec: num_classes must be >= 2");
  if (latent_dim < 1) throw ShapeError("spec: latent_dim must be >= 1");
  if (embedding_dim < 1) throw ShapeError("spec: embedding_dim must be >= 1");
  if (initial_channels < 1) throw ShapeError("spec: initial_channels must be >= 1");
  if (blocks.empty()) throw ShapeError("spec: at least one block is required");
  if (blocks.size() > 8) throw ShapeError("spec: at most 8 blocks are supported");
  Index expected = initial_channels;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].in_channels != expected) {
      throw ShapeError("spec: block " + std::to_string(b) + " input channels must equal the previous output channels");
    }
    if (blocks[b].out_channels < 1) throw ShapeError("spec: block output channels must be >= 1");
    expected = blocks[b].out_channels;
  }
}

GeneratorWeights GeneratorWeights::zeros(const GeneratorSpec& spec) {
  spec.validate();
  const Index cd = spec.conditioning_dim();
  GeneratorWeights w;
  w.embedding = Tensor({spec.num_classes, spec.embedding_dim});
  w.stem_weight = Tensor({spec.initial_channels * 16, cd});
  w.stem_bias = Eigen::VectorXf::Zero(spec.initial_channels * 16);
  for (const auto& b : spec.blocks) {
    BlockWeights bw;
    bw.gamma_weight = Tensor({b.in_channels, cd});
    bw.gamma_bias = Eigen::VectorXf::Zero(b.in_channels);
    bw.beta_weight = Tensor({b.in_channels, cd});
    bw.beta_bias = Eigen::VectorXf::Zero(b.in_channels);
    bw.conv_weight = Tensor({b.out_channels, b.in_channels, 3, 3});
    bw.conv_bias = Eigen::VectorXf::Zero(b.out_channels);
    w.blocks.push_back(std::move(bw));
  }
  w.output_weight = Tensor({GeneratorSpec::kOutputChannels, spec.blocks.back().out_channels, 3, 3});
  w.output_bias = Eigen::VectorXf::Zero(GeneratorSpec::kOutputChannels);
  return w;
}

void GeneratorWeights::validate(const GeneratorSpec& spec) const {
  spec.validate();
  const Index cd = spec.conditioning_dim();
  expect_shape(embedding, {spec.num_classes, spec.embedding_dim}, "embedding");
  expect_shape(stem_weight, {spec.initial_channels * 16, cd}, "stem.weight");
  expect_vector(stem_bias, spec.initial_channels * 16, "stem.bias");
  if (blocks.size() != spec.blocks.size()) throw ShapeError("weights: block count does not match spec");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& s = spec.blocks[b];
    const auto& w = blocks[b];
    const std::string p = "blocks." + std::to_string(b) + ".";
    expect_shape(w.gamma_weight, {s.in_channels, cd}, p + "gamma.weight");
    expect_vector(w.gamma_bias, s.in_channels, p + "gamma.bias");
    expect_shape(w.beta_weight, {s.in_channels, cd}, p + "beta.weight");
    expect_vector(w.beta_bias, s.in_channels, p + "beta.bias");
    expect_shape(w.conv_weight, {s.out_channels, s.in_channels, 3, 3}, p + "conv.weight");
    expect_vector(w.conv_bias, s.out_channels, p + "conv.bias");
  }
  expect_shape(output_weight, {GeneratorSpec::kOutputChannels, spec.blocks.back().out_channels, 3, 3},
               "output.weight");
  expect_vector(output_bias, GeneratorSpec::kOutputChannels, "output.bias");
}

Generator::Generator(GeneratorSpec spec, GeneratorWeights weights)
    : spec_(std::move(spec)), weights_(std::move(weights)) {
  weights_.validate(spec_);
}

Eigen::VectorXf conditioning_vector(const Generator& g, const Eigen::VectorXf& z, Index class_id) {
  const auto& s = g.spec();
  if (class_id < 0 || class_id >= s.num_classes) {
    throw bad_class("class " + idx(class_id) + " out of range [0, " + idx(s.num_classes) + ")");
  }
  if (z.size() != s.latent_dim) throw bad_param("latent vector must have length " + idx(s.latent_dim));
  Eigen::VectorXf c(s.conditioning_dim());
  c.head(s.latent_dim) = z;
  const auto& e = g.weights().embedding;
  c.tail(s.embedding_dim) = e.data().segment(class_id * s.embedding_dim, s.embedding_dim);
  return c;
}

Modulation compute_modulation(const Generator& g, const Eigen::VectorXf& conditioning, Index block) {
  if (block < 0 || block >= g.spec().num_blocks()) throw bad_block("block " + idx(block) + " out of range");
  const auto& w = g.weights().blocks[static_cast<std::size_t>(block)];
  Modulation m;
  m.gamma = dense(conditioning, w.gamma_weight, w.gamma_bias);
  m.gamma.array() += 1.0f;
  m.beta = dense(conditioning, w.beta_weight, w.beta_bias);
  return m;
}

Modulation compute_modulation(const Generator& g, const ConditioningInput& cond, Index block) {
  return compute_modulation(g, conditioning_vector(g, cond.z, cond.class_id), block);
}

Tensor ccbn(const Tensor& x, const Eigen::VectorXf& gamma, const Eigen::VectorXf& beta) {
  x.require_rank3("ccbn input");
  if (gamma.size() != x.channels() || beta.size() != x.channels()) {
    throw ShapeError("ccbn: gamma/beta length does not match channel count");
  }
  Tensor y(x.shape());
  for (Index c = 0; c < x.channels(); ++c) {
    y.channel(c) = (gamma[c] * x.channel(c).array() + beta[c]).matrix();
  }
  return y;
}

InterventionPlan& InterventionPlan::zero(Index block, std::vector<Index> channels) {
  edits.push_back({block, std::move(channels), EditAction::zero, 0.0f, nullptr});
  return *this;
}

InterventionPlan& InterventionPlan::multiply(Index block, std::vector<Index> channels, float magnitude) {
  edits.push_back({block, std::move(channels), EditAction::multiply, magnitude, nullptr});
  return *this;
}

InterventionPlan& InterventionPlan::add(Index block, std::vector<Index> channels, float magnitude) {
  edits.push_back({block, std::move(channels), EditAction::add, magnitude, nullptr});
  return *this;
}

InterventionPlan& InterventionPlan::substitute(Index block, std::vector<Index> channels,
                                               std::shared_ptr<const Tensor> donor) {
  edits.push_back({block, std::move(channels), EditAction::substitute, 0.0f, std::move(donor)});
  return *this;
}

bool InterventionPlan::touches(Index block) const {
  for (const auto& e : edits) {
    if (e.block == block) return true;
  }
  return false;
}

void InterventionPlan::validate(const GeneratorSpec& spec) const {
  for (const auto& e : edits) {
    if (e.block < 0 || e.block >= spec.num_blocks()) throw bad_block("edit block " + idx(e.block) + " out of range");
    const Index c = spec.block_channels(e.block);
    for (Index ch : e.channels) {
      if (ch < 0 || ch >= c) {
        throw bad_channel("edit channel " + idx(ch) + " out of range for block " + idx(e.block));
      }
    }
    if (!std::isfinite(e.magnitude)) throw bad_param("edit magnitude must be finite");
    if (e.action == EditAction::substitute) {
      const Index r = spec.block_resolution(e.block);
      if (!e.donor || e.donor->shape() != std::vector<Index>{c, r, r}) {
        throw ShapeError("substitute edit: donor feature has the wrong shape for block " + idx(e.block));
      }
    }
  }
}

void apply_edits(const InterventionPlan& plan, Index block, Tensor& post_relu) {
  for (const auto& e : plan.edits) {
    if (e.block != block) continue;
    for (Index c : e.channels) {
      auto ch = post_relu.channel(c);
      switch (e.action) {
        case EditAction::zero:
          ch.setZero();
          break;
        case EditAction::multiply:
          ch *= e.magnitude;
          break;
        case EditAction::add:
          ch.array() += e.magnitude;
          break;
        case EditAction::substitute:
          ch = e.donor->channel(c);
          break;
      }
    }
  }
}

ForwardResult forward(const Generator& g, const ConditioningInput& cond, const InterventionPlan& plan,
                      ClassSchedule schedule) {
  check_schedule(g, schedule);
  plan.validate(g.spec());
  const auto& s = g.spec();

  ForwardResult result;
  result.trace.blocks.resize(static_cast<std::size_t>(s.num_blocks()));

  Tensor x = stem_feature(g, conditioning_vector(g, cond.z, class_for_block(cond, schedule, 0)));
  for (Index b = 0; b < s.num_blocks(); ++b) {
    auto& bt = result.trace.blocks[static_cast<std::size_t>(b)];
    bt.class_id = class_for_block(cond, schedule, b);
    bt.conditioning = conditioning_vector(g, cond.z, bt.class_id);
    Modulation m = compute_modulation(g, bt.conditioning, b);
    bt.probe.resize(m.gamma.size());
    bt.gamma_sign.resize(static_cast<std::size_t>(m.gamma.size()));
    for (Index c = 0; c < m.gamma.size(); ++c) {
      const ChannelProbe p = channel_probe(m.gamma[c], m.beta[c]);
      bt.probe[c] = p.t;
      bt.gamma_sign[static_cast<std::size_t>(c)] = p.gamma_sign;
    }
    Tensor y = modulated_relu(x, m);
    apply_edits(plan, b, y);
    bt.gamma = std::move(m.gamma);
    bt.beta = std::move(m.beta);
    bt.pre_norm = std::move(x);
    x = block_output(g, b, y);
    bt.post_relu = std::move(y);
  }
  result.image = render(g, x);
  return result;
}

Tensor block_convolution(const Generator& g, Index block, const Tensor& post_relu) {
  if (block < 0 || block >= g.spec().num_blocks()) throw bad_block("block " + idx(block) + " out of range");
  return block_output(g, block, post_relu);
}

Tensor resume_forward(const Generator& g, const ConditioningInput& cond, Index block, const Tensor& post_relu,
                      const InterventionPlan& plan, ClassSchedule schedule) {
  const auto& s = g.spec();
  if (block < 0 || block >= s.num_blocks()) throw bad_block("block " + idx(block) + " out of range");
  const Index r = s.block_resolution(block);
  if (post_relu.shape() != std::vector<Index>{s.block_channels(block), r, r}) {
    throw ShapeError("resume_forward: feature shape does not match block " + idx(block));
  }
  return resume_from_convolution(g, cond, block, block_output(g, block, post_relu), plan, schedule);
}

Tensor resume_from_convolution(const Generator& g, const ConditioningInput& cond, Index block, Tensor conv_output,
                               const InterventionPlan& plan, ClassSchedule schedule) {
  check_schedule(g, schedule);
  plan.validate(g.spec());
  const auto& s = g.spec();
  if (block < 0 || block >= s.num_blocks()) throw bad_block("block " + idx(block) + " out of range");
  const Index r = s.block_resolution(block) * 2;
  if (conv_output.shape() != std::vector<Index>{s.blocks[static_cast<std::size_t>(block)].out_channels, r, r}) {
    throw ShapeError("resume_from_convolution: feature shape does not match block " + idx(block));
  }
  Tensor x = std::move(conv_output);
  for (Index b = block + 1; b < s.num_blocks(); ++b) {
    const Eigen::VectorXf c = conditioning_vector(g, cond.z, class_for_block(cond, schedule, b));
    Tensor y = modulated_relu(x, compute_modulation(g, c, b));
    apply_edits(plan, b, y);
    x = block_output(g, b, y);
  }
  return render(g, x);
}

}  // namespace awarekit
