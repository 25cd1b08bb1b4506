#include "awarekit/interventions.hpp"

#include "awarekit/error.hpp"
#include "awarekit/random.hpp"

#include <map>

namespace awarekit {

DifferenceMap difference_map(const Tensor& a, const Tensor& b) {
  a.require_rank3("difference_map");
  if (a.shape() != b.shape()) throw ShapeError("difference_map: images have different shapes");
  const Index hw = a.plane_size();
  DifferenceMap d;
  d.map = Tensor({1, a.height(), a.width()});
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(hw);
  for (Index c = 0; c < a.channels(); ++c) {
    acc += (a.channel(c) - b.channel(c)).cwiseAbs().cast<double>();
  }
  acc /= static_cast<double>(a.channels());
  d.map.data() = acc.cast<float>();
  d.aggregate = acc.mean();
  return d;
}

InterventionPlan zero_plan(const std::vector<ChannelRef>& channels) {
  std::map<Index, std::vector<Index>> by_block;
  for (const auto& r : channels) by_block[r.block].push_back(r.channel);
  InterventionPlan plan;
  for (auto& [block, list] : by_block) plan.zero(block, std::move(list));
  return plan;
}

ZeroOutResult zero_out(const Generator& g, const ConditioningInput& cond, const std::vector<ChannelRef>& channels) {
  const InterventionPlan plan = zero_plan(channels);
  plan.validate(g.spec());
  const Tensor base = forward(g, cond).image;
  ZeroOutResult r;
  r.channels = channels;
  r.image = plan.empty() ? base : forward(g, cond, plan).image;
  r.difference = difference_map(r.image, base);
  return r;
}

std::vector<ZeroOutResult> zero_out_groups(const Generator& g, const ConditioningInput& cond,
                                           const std::vector<ChannelRef>& channels, Index group_size) {
  if (group_size < 1) throw bad_param("group size must be >= 1");
  zero_plan(channels).validate(g.spec());
  const Tensor base = forward(g, cond).image;
  std::vector<ZeroOutResult> out;
  for (std::size_t start = 0; start < channels.size(); start += static_cast<std::size_t>(group_size)) {
    const auto end = std::min(channels.size(), start + static_cast<std::size_t>(group_size));
    ZeroOutResult r;
    r.channels.assign(channels.begin() + static_cast<std::ptrdiff_t>(start),
                      channels.begin() + static_cast<std::ptrdiff_t>(end));
    r.image = forward(g, cond, zero_plan(r.channels)).image;
    r.difference = difference_map(r.image, base);
    out.push_back(std::move(r));
  }
  return out;
}

Tensor modulate_channel(const Generator& g, const ConditioningInput& cond, ChannelRef channel, ModulationMode mode,
                        float magnitude) {
  InterventionPlan plan;
  if (mode == ModulationMode::multiply) {
    plan.multiply(channel.block, {channel.channel}, magnitude);
  } else {
    plan.add(channel.block, {channel.channel}, magnitude);
  }
  return forward(g, cond, plan).image;
}

std::vector<ChannelRef> random_channels(const AwarenessTable& table, Index k, std::uint64_t seed,
                                        std::optional<Index> block_filter) {
  // Eligible channels in (block, channel) order.
  std::vector<ChannelRef> pool;
  for (const auto& b : table.blocks) {
    if (block_filter && *block_filter != b.block) continue;
    for (Index c = 0; c < b.channels(); ++c) {
      if (!b.inactive[static_cast<std::size_t>(c)]) pool.push_back({b.block, c});
    }
  }
  if (k < 0 || k > static_cast<Index>(pool.size())) throw bad_param("k exceeds the eligible channel count");
  Rng rng(seed, Stream::channel_choice, static_cast<std::uint64_t>(table.class_id));
  for (Index i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(pool.size() - static_cast<std::size_t>(i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

Index default_mix_block(const GeneratorSpec& spec) {
  const Index b = spec.num_blocks();
  return std::min((b + 1) / 2, b - 1);
}

std::vector<Index> hybrid_channels(const AwarenessTable& reference_table, Index block, Index k) {
  return top_k_channels(reference_table, Criterion::category, Direction::top, k, block).in_block(block);
}

HybridResult hybridize(const Generator& g, const HybridizationRequest& req) {
  const auto& s = g.spec();
  for (Index c : {req.input_class, req.reference_class}) {
    if (c < 0 || c >= s.num_classes) throw bad_class("class " + std::to_string(c) + " out of range");
  }
  if (req.input_class == req.reference_class && !req.allow_same_class) {
    throw bad_class("input and reference classes must differ");
  }
  if (req.mix_blocks.empty()) throw bad_block("at least one mix block is required");
  if (req.channels.size() != req.mix_blocks.size()) throw bad_param("one channel list per mix block is required");
  Index last = -1;
  for (Index b : req.mix_blocks) {
    if (b < 0 || b >= s.num_blocks()) throw bad_block("mix block " + std::to_string(b) + " out of range");
    if (b <= last) throw bad_block("mix blocks must be strictly increasing");
    last = b;
  }

  HybridResult out;
  const ForwardResult input = forward(g, {req.z, req.input_class});
  const ForwardResult reference = forward(g, {req.z, req.reference_class});
  out.input = input.image;
  out.reference = reference.image;

  std::vector<Index> schedule(static_cast<std::size_t>(s.num_blocks()), req.input_class);
  if (req.reference_downstream) {
    for (Index b = last + 1; b < s.num_blocks(); ++b) schedule[static_cast<std::size_t>(b)] = req.reference_class;
  }
  InterventionPlan plan;
  for (std::size_t i = 0; i < req.mix_blocks.size(); ++i) {
    const Index b = req.mix_blocks[i];
    if (req.channels[i].empty()) continue;
    plan.substitute(b, req.channels[i],
                    std::make_shared<const Tensor>(reference.trace.blocks[static_cast<std::size_t>(b)].post_relu));
  }
  out.hybrid = forward(g, {req.z, req.input_class}, plan, schedule).image;
  return out;
}

Tensor style_mixing_baseline(const Generator& g, const Eigen::VectorXf& z, Index input_class, Index reference_class,
                             Index switch_block) {
  const auto& s = g.spec();
  if (switch_block < 0 || switch_block > s.num_blocks()) {
    throw bad_block("switch block " + std::to_string(switch_block) + " out of range [0, " +
                    std::to_string(s.num_blocks()) + "]");
  }
  std::vector<Index> schedule(static_cast<std::size_t>(s.num_blocks()));
  for (Index b = 0; b < s.num_blocks(); ++b) {
    schedule[static_cast<std::size_t>(b)] = b < switch_block ? input_class : reference_class;
  }
  return forward(g, {z, input_class}, {}, schedule).image;
}

nlohmann::ordered_json to_json(const DifferenceMap& d) { return {{"aggregate", d.aggregate}}; }

}  // namespace awarekit
