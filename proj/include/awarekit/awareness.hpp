#pragma once

#include "awarekit/generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <vector>

namespace awarekit {

struct ChannelRef {
  Index block = 0;
  Index channel = 0;
  auto operator<=>(const ChannelRef&) const = default;
};

enum class ProbeFilter { include_all, positive_gamma_only };

struct AwarenessOptions {
  Index samples = 256;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = hardware concurrency
  ProbeFilter filter = ProbeFilter::include_all;
  bool keep_samples = false;
};

struct BlockAwareness {
  Index block = 0;
  Eigen::VectorXd mean_t;
  Eigen::VectorXd var_t;
  std::vector<Index> used;     // draws that contributed to each channel
  std::vector<bool> inactive;  // inactive in more than half of the draws

  Index channels() const { return mean_t.size(); }
};

/// Raw per-draw probes, rows = draws, columns = channels in (block, channel) order.
struct ProbeSamples {
  Eigen::MatrixXf t;
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic> sign;  // GammaSign values
};

struct AwarenessTable {
  Index class_id = 0;
  Index num_samples = 0;
  std::uint64_t seed = 0;
  ProbeFilter filter = ProbeFilter::include_all;
  std::vector<BlockAwareness> blocks;
  double total_awareness = 0.0;
  std::optional<ProbeSamples> samples;

  /// -E[t]
  double category(ChannelRef r) const { return -block(r.block).mean_t[r.channel]; }
  /// Var(t)
  double latent(ChannelRef r) const { return block(r.block).var_t[r.channel]; }
  const BlockAwareness& block(Index b) const;
  Index total_channels() const;
};

AwarenessTable estimate_awareness(const Generator& g, Index class_id, const AwarenessOptions& options = {});

/// Sum of |E[t]| over every block and channel.
double total_awareness(const std::vector<BlockAwareness>& blocks);

enum class Criterion { category, latent };
enum class Direction { top, bottom };

struct ChannelSet {
  Index class_id = 0;
  Criterion criterion = Criterion::category;
  Direction direction = Direction::top;
  Index k = 0;
  std::vector<ChannelRef> channels;  // in selection order

  /// Channel indices of the selection that fall in `block`.
  std::vector<Index> in_block(Index block) const;
};

/// All channels eligible for ranking (flagged-inactive channels are excluded), sorted by the criterion;
/// ties go to the lower (block, channel).
std::vector<ChannelRef> rank_channels(const AwarenessTable& table, Criterion criterion, Direction direction,
                                      std::optional<Index> block_filter = std::nullopt);

ChannelSet top_k_channels(const AwarenessTable& table, Criterion criterion, Direction direction, Index k,
                          std::optional<Index> block_filter = std::nullopt);

/// |a ∩ b| / k
double channel_overlap(const ChannelSet& a, const ChannelSet& b);

struct SharedChannels {
  std::vector<ChannelRef> channels;
  std::vector<Index> per_block;
};

/// Per-block top-k sets intersected across all tables.
SharedChannels shared_channels(const std::vector<AwarenessTable>& tables, Criterion criterion, Direction direction,
                               Index k);

nlohmann::ordered_json to_json(const AwarenessTable& table);
AwarenessTable awareness_from_json(const nlohmann::json& j);

const char* to_string(Criterion c);
const char* to_string(Direction d);
const char* to_string(ProbeFilter f);
Criterion parse_criterion(const std::string& s);
Direction parse_direction(const std::string& s);

}  // namespace awarekit
