#pragma once

#include "awarekit/awareness.hpp"
#include "awarekit/generator.hpp"

#include <json.hpp>

#include <optional>
#include <vector>

namespace awarekit {

struct DifferenceMap {
  Tensor map;  // 1 x H x W, mean over channels of |a - b|
  double aggregate = 0.0;
};

DifferenceMap difference_map(const Tensor& a, const Tensor& b);

/// Groups references by block into a plan applying `action` to each.
InterventionPlan zero_plan(const std::vector<ChannelRef>& channels);

struct ZeroOutResult {
  std::vector<ChannelRef> channels;
  Tensor image;
  DifferenceMap difference;
};

/// Zeroes all listed channels in one forward and compares against the unedited synthesis.
ZeroOutResult zero_out(const Generator& g, const ConditioningInput& cond, const std::vector<ChannelRef>& channels);

/// One record per consecutive group of `group_size` channels, in the given order.
std::vector<ZeroOutResult> zero_out_groups(const Generator& g, const ConditioningInput& cond,
                                           const std::vector<ChannelRef>& channels, Index group_size);

enum class ModulationMode { multiply, add };

Tensor modulate_channel(const Generator& g, const ConditioningInput& cond, ChannelRef channel, ModulationMode mode,
                        float magnitude);

/// k channels drawn uniformly without replacement from the table's eligible channels (optionally one block),
/// using the channel-choice stream.
std::vector<ChannelRef> random_channels(const AwarenessTable& table, Index k, std::uint64_t seed,
                                        std::optional<Index> block_filter = std::nullopt);

struct HybridizationRequest {
  Index input_class = 0;
  Index reference_class = 1;
  Eigen::VectorXf z;
  /// Blocks whose listed channels are transplanted; blocks up to the last one keep the input class.
  std::vector<Index> mix_blocks;
  /// channels[i] are the channel indices transplanted at mix_blocks[i].
  std::vector<std::vector<Index>> channels;
  /// Condition blocks after the last mix block on the reference class.
  bool reference_downstream = true;
  /// Permit input_class == reference_class (degenerate self-mix checks).
  bool allow_same_class = false;
};

struct HybridResult {
  Tensor hybrid;
  Tensor input;
  Tensor reference;
};

/// Default mix block: ceil(B / 2), clamped to the last block.
Index default_mix_block(const GeneratorSpec& spec);

/// Top-k category-awareness channels of the reference class at `block`.
std::vector<Index> hybrid_channels(const AwarenessTable& reference_table, Index block, Index k);

HybridResult hybridize(const Generator& g, const HybridizationRequest& req);

/// Blocks < switch_block use input_class, blocks >= switch_block use reference_class.
Tensor style_mixing_baseline(const Generator& g, const Eigen::VectorXf& z, Index input_class, Index reference_class,
                             Index switch_block);

nlohmann::ordered_json to_json(const DifferenceMap& d);

}  // namespace awarekit
