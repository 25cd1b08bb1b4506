#include "awarekit/awareness.hpp"

#include "awarekit/error.hpp"
#include "awarekit/parallel.hpp"
#include "awarekit/random.hpp"

#include <algorithm>
#include <cmath>

namespace awarekit {

namespace {

std::vector<Index> block_offsets(const GeneratorSpec& s) {
  std::vector<Index> off{0};
  for (const auto& b : s.blocks) off.push_back(off.back() + b.in_channels);
  return off;
}

bool counts(GammaSign s, ProbeFilter f) {
  if (s == GammaSign::inactive) return false;
  return f == ProbeFilter::include_all || s == GammaSign::positive;
}

double statistic(const AwarenessTable& t, ChannelRef r, Criterion c) {
  return c == Criterion::category ? t.category(r) : t.latent(r);
}

}  // namespace

const BlockAwareness& AwarenessTable::block(Index b) const {
  if (b < 0 || b >= static_cast<Index>(blocks.size())) throw bad_block("block " + std::to_string(b) + " not in table");
  return blocks[static_cast<std::size_t>(b)];
}

Index AwarenessTable::total_channels() const {
  Index n = 0;
  for (const auto& b : blocks) n += b.channels();
  return n;
}

double total_awareness(const std::vector<BlockAwareness>& blocks) {
  double sum = 0.0;
  for (const auto& b : blocks) sum += b.mean_t.cwiseAbs().sum();
  return sum;
}

AwarenessTable estimate_awareness(const Generator& g, Index class_id, const AwarenessOptions& options) {
  const auto& s = g.spec();
  if (options.samples < 2) throw bad_param("awareness needs at least 2 samples");
  if (class_id < 0 || class_id >= s.num_classes) throw bad_class("class " + std::to_string(class_id) + " out of range");

  const Index n = options.samples;
  const auto off = block_offsets(s);
  const Index total = off.back();

  ProbeSamples raw;
  raw.t.resize(n, total);
  raw.sign.resize(n, total);
  parallel_for(static_cast<std::size_t>(n), options.workers, [&](std::size_t i) {
    const Eigen::VectorXf z = sample_latent(s.latent_dim, options.seed, i);
    const Eigen::VectorXf c = conditioning_vector(g, z, class_id);
    for (Index b = 0; b < s.num_blocks(); ++b) {
      const Modulation m = compute_modulation(g, c, b);
      for (Index ch = 0; ch < m.gamma.size(); ++ch) {
        const ChannelProbe p = channel_probe(m.gamma[ch], m.beta[ch]);
        raw.t(static_cast<Index>(i), off[b] + ch) = p.t;
        raw.sign(static_cast<Index>(i), off[b] + ch) = static_cast<std::int8_t>(p.gamma_sign);
      }
    }
  });

  AwarenessTable table;
  table.class_id = class_id;
  table.num_samples = n;
  table.seed = options.seed;
  table.filter = options.filter;
  for (Index b = 0; b < s.num_blocks(); ++b) {
    const Index cb = s.block_channels(b);
    BlockAwareness ba;
    ba.block = b;
    ba.mean_t = Eigen::VectorXd::Zero(cb);
    ba.var_t = Eigen::VectorXd::Zero(cb);
    ba.used.assign(static_cast<std::size_t>(cb), 0);
    ba.inactive.assign(static_cast<std::size_t>(cb), false);
    for (Index ch = 0; ch < cb; ++ch) {
      const Index col = off[b] + ch;
      double sum = 0.0;
      Index used = 0, inactive = 0;
      for (Index i = 0; i < n; ++i) {
        const auto sign = static_cast<GammaSign>(raw.sign(i, col));
        if (sign == GammaSign::inactive) ++inactive;
        if (!counts(sign, options.filter)) continue;
        sum += raw.t(i, col);
        ++used;
      }
      const double mean = used > 0 ? sum / static_cast<double>(used) : 0.0;
      double ss = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (!counts(static_cast<GammaSign>(raw.sign(i, col)), options.filter)) continue;
        const double d = raw.t(i, col) - mean;
        ss += d * d;
      }
      ba.mean_t[ch] = mean;
      ba.var_t[ch] = used > 1 ? ss / static_cast<double>(used - 1) : 0.0;
      ba.used[static_cast<std::size_t>(ch)] = used;
      ba.inactive[static_cast<std::size_t>(ch)] = 2 * inactive > n;
    }
    table.blocks.push_back(std::move(ba));
  }
  table.total_awareness = total_awareness(table.blocks);
  if (options.keep_samples) table.samples = std::move(raw);
  return table;
}

std::vector<Index> ChannelSet::in_block(Index block) const {
  std::vector<Index> out;
  for (const auto& r : channels) {
    if (r.block == block) out.push_back(r.channel);
  }
  return out;
}

std::vector<ChannelRef> rank_channels(const AwarenessTable& table, Criterion criterion, Direction direction,
                                      std::optional<Index> block_filter) {
  std::vector<ChannelRef> refs;
  std::vector<double> values;
  for (const auto& b : table.blocks) {
    if (block_filter && *block_filter != b.block) continue;
    for (Index c = 0; c < b.channels(); ++c) {
      if (b.inactive[static_cast<std::size_t>(c)]) continue;
      refs.push_back({b.block, c});
    }
  }
  if (block_filter && (*block_filter < 0 || *block_filter >= static_cast<Index>(table.blocks.size()))) {
    throw bad_block("block " + std::to_string(*block_filter) + " not in table");
  }
  values.reserve(refs.size());
  for (const auto& r : refs) values.push_back(statistic(table, r, criterion));
  std::vector<std::size_t> order(refs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Direction::top ? values[a] > values[b] : values[a] < values[b];
  });
  std::vector<ChannelRef> out;
  out.reserve(refs.size());
  for (std::size_t i : order) out.push_back(refs[i]);
  return out;
}

ChannelSet top_k_channels(const AwarenessTable& table, Criterion criterion, Direction direction, Index k,
                          std::optional<Index> block_filter) {
  if (k < 0) throw bad_param("k must be non-negative");
  auto ranked = rank_channels(table, criterion, direction, block_filter);
  if (k > static_cast<Index>(ranked.size())) {
    throw bad_param("k = " + std::to_string(k) + " exceeds the " + std::to_string(ranked.size()) +
                    " eligible channels");
  }
  ranked.resize(static_cast<std::size_t>(k));
  return {table.class_id, criterion, direction, k, std::move(ranked)};
}

double channel_overlap(const ChannelSet& a, const ChannelSet& b) {
  if (a.channels.size() != b.channels.size()) throw bad_param("channel_overlap: sets have different sizes");
  if (a.channels.empty()) throw bad_param("channel_overlap: k must be positive");
  std::vector<ChannelRef> x = a.channels, y = b.channels;
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  std::vector<ChannelRef> common;
  std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(a.channels.size());
}

SharedChannels shared_channels(const std::vector<AwarenessTable>& tables, Criterion criterion, Direction direction,
                               Index k) {
  if (tables.empty()) throw bad_param("shared_channels needs at least one table");
  SharedChannels out;
  const Index blocks = static_cast<Index>(tables.front().blocks.size());
  for (Index b = 0; b < blocks; ++b) {
    std::vector<ChannelRef> acc;
    for (std::size_t i = 0; i < tables.size(); ++i) {
      auto set = top_k_channels(tables[i], criterion, direction, k, b).channels;
      std::sort(set.begin(), set.end());
      if (i == 0) {
        acc = std::move(set);
        continue;
      }
      std::vector<ChannelRef> next;
      std::set_intersection(acc.begin(), acc.end(), set.begin(), set.end(), std::back_inserter(next));
      acc = std::move(next);
    }
    out.per_block.push_back(static_cast<Index>(acc.size()));
    out.channels.insert(out.channels.end(), acc.begin(), acc.end());
  }
  return out;
}

const char* to_string(Criterion c) { return c == Criterion::category ? "category" : "latent"; }
const char* to_string(Direction d) { return d == Direction::top ? "top" : "bottom"; }
const char* to_string(ProbeFilter f) {
  return f == ProbeFilter::include_all ? "include_all" : "positive_gamma_only";
}

Criterion parse_criterion(const std::string& s) {
  if (s == "category") return Criterion::category;
  if (s == "latent") return Criterion::latent;
  throw bad_param("unknown criterion '" + s + "'");
}

Direction parse_direction(const std::string& s) {
  if (s == "top") return Direction::top;
  if (s == "bottom") return Direction::bottom;
  throw bad_param("unknown direction '" + s + "'");
}

nlohmann::ordered_json to_json(const AwarenessTable& table) {
  nlohmann::ordered_json j;
  j["class_id"] = table.class_id;
  j["num_samples"] = table.num_samples;
  j["seed"] = table.seed;
  j["filter"] = to_string(table.filter);
  auto layers = nlohmann::ordered_json::array();
  for (const auto& b : table.blocks) {
    nlohmann::ordered_json l;
    l["block"] = b.block;
    l["mean_t"] = std::vector<double>(b.mean_t.data(), b.mean_t.data() + b.mean_t.size());
    l["var_t"] = std::vector<double>(b.var_t.data(), b.var_t.data() + b.var_t.size());
    l["inactive"] = b.inactive;
    l["used"] = b.used;
    layers.push_back(std::move(l));
  }
  j["layers"] = std::move(layers);
  j["total_awareness"] = table.total_awareness;
  return j;
}

AwarenessTable awareness_from_json(const nlohmann::json& j) {
  AwarenessTable t;
  try {
    t.class_id = j.at("class_id").get<Index>();
    t.num_samples = j.at("num_samples").get<Index>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.filter = j.value("filter", std::string("include_all")) == "positive_gamma_only" ? ProbeFilter::positive_gamma_only
                                                                                      : ProbeFilter::include_all;
    for (const auto& l : j.at("layers")) {
      BlockAwareness b;
      b.block = l.at("block").get<Index>();
      const auto mean = l.at("mean_t").get<std::vector<double>>();
      const auto var = l.at("var_t").get<std::vector<double>>();
      if (mean.size() != var.size()) throw bad_param("awareness layer has mismatched mean_t/var_t lengths");
      b.mean_t = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Index>(mean.size()));
      b.var_t = Eigen::Map<const Eigen::VectorXd>(var.data(), static_cast<Index>(var.size()));
      b.inactive = l.value("inactive", std::vector<bool>(mean.size(), false));
      b.used = l.value("used", std::vector<Index>(mean.size(), t.num_samples));
      if (b.inactive.size() != mean.size() || b.used.size() != mean.size()) {
        throw bad_param("awareness layer has inconsistent array lengths");
      }
      t.blocks.push_back(std::move(b));
    }
    t.total_awareness = j.at("total_awareness").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw bad_param(std::string("malformed awareness report: ") + e.what());
  }
  return t;
}

}  // namespace awarekit
