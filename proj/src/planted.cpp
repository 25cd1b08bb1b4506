#include "awarekit/planted.hpp"

#include "awarekit/error.hpp"
#include "awarekit/random.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace awarekit {

namespace {

Error bad_spec(const std::string& m) { return Error("bad_spec", m); }

std::string at_block(std::size_t b) { return " (block " + std::to_string(b) + ")"; }

void check_indices(const std::vector<Index>& set, Index channels, const std::string& what, std::size_t b) {
  std::set<Index> seen;
  for (Index c : set) {
    if (c < 0 || c >= channels) throw bad_spec(what + " channel " + std::to_string(c) + " out of range" + at_block(b));
    if (!seen.insert(c).second) throw bad_spec(what + " set lists channel " + std::to_string(c) + " twice" + at_block(b));
  }
}

bool disjoint(const std::vector<Index>& a, const std::vector<Index>& b) {
  for (Index x : a) {
    if (std::find(b.begin(), b.end(), x) != b.end()) return false;
  }
  return true;
}

bool contains(const std::vector<Index>& set, Index c) { return std::find(set.begin(), set.end(), c) != set.end(); }

// Closed-form beta constant of (class, block, channel) and whether it follows the latent.
struct BetaRule {
  ChannelRole role = ChannelRole::background;
  float constant = 0.0f;
  Index latent_index = -1;
};

BetaRule beta_rule(const PlantedSpec& s, Index e, std::size_t b, Index c) {
  const auto& blk = s.blocks[b];
  if (contains(blk.planted[static_cast<std::size_t>(e)], c)) return {ChannelRole::planted, float(s.b_active), -1};
  if (contains(blk.dead, c)) return {ChannelRole::dead, float(s.b_dead), -1};
  const auto it = std::find(blk.shared.begin(), blk.shared.end(), c);
  if (it != blk.shared.end()) {
    return {ChannelRole::shared, float(s.gate(e)), static_cast<Index>(it - blk.shared.begin()) % s.latent_dim};
  }
  for (const auto& other : blk.planted) {
    if (contains(other, c)) return {ChannelRole::suppressed, float(s.b_suppressed), -1};
  }
  return {ChannelRole::background, float(s.b_background), -1};
}

}  // namespace

double PlantedSpec::gate(Index class_id) const {
  return shared_gates.empty() ? 0.0 : shared_gates.at(static_cast<std::size_t>(class_id));
}

GeneratorSpec PlantedSpec::generator_spec() const {
  GeneratorSpec g;
  g.num_classes = num_classes;
  g.latent_dim = latent_dim;
  g.embedding_dim = num_classes;
  g.initial_channels = initial_channels;
  for (const auto& b : blocks) g.blocks.push_back({b.channels, b.out_channels});
  return g;
}

void PlantedSpec::validate() const {
  if (num_classes < 2) throw bad_spec("num_classes must be >= 2");
  if (latent_dim < 1) throw bad_spec("latent_dim must be >= 1");
  if (blocks.empty()) throw bad_spec("at least one block is required");
  if (!(b_active > 0.0 && 0.0 > b_suppressed && b_suppressed > b_dead)) {
    throw bad_spec("magnitudes must satisfy b_active > 0 > b_suppressed > b_dead");
  }
  if (!std::isfinite(b_background) || !std::isfinite(latent_norm)) throw bad_spec("magnitudes must be finite");
  if (!shared_gates.empty() && static_cast<Index>(shared_gates.size()) != num_classes) {
    throw bad_spec("shared_gates needs one entry per class");
  }
  for (double g : shared_gates) {
    if (!std::isfinite(g)) throw bad_spec("shared gates must be finite");
  }
  try {
    generator_spec().validate();
  } catch (const ShapeError& e) {
    throw bad_spec(e.what());
  }
  Index per_class = -1;
  std::vector<Index> totals(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    if (static_cast<Index>(blk.planted.size()) != num_classes) throw bad_spec("planted needs one set per class" + at_block(b));
    check_indices(blk.shared, blk.channels, "shared", b);
    check_indices(blk.dead, blk.channels, "dead", b);
    if (!disjoint(blk.shared, blk.dead)) throw bad_spec("shared and dead sets must be disjoint" + at_block(b));
    for (std::size_t e = 0; e < blk.planted.size(); ++e) {
      check_indices(blk.planted[e], blk.channels, "planted", b);
      if (!disjoint(blk.planted[e], blk.shared)) {
        throw bad_spec("planted set of class " + std::to_string(e) + " must be disjoint from the shared set" + at_block(b));
      }
      if (!disjoint(blk.planted[e], blk.dead)) {
        throw bad_spec("planted set of class " + std::to_string(e) + " must be disjoint from the dead set" + at_block(b));
      }
      totals[e] += static_cast<Index>(blk.planted[e].size());
    }
  }
  for (Index t : totals) {
    if (per_class < 0) per_class = t;
    if (t != per_class) throw bad_spec("every class needs the same number of planted channels");
  }
  if (per_class < 1) throw bad_spec("every class needs at least one planted channel");
}

PlantedSpec make_planted_spec(const PlantedLayout& layout) {
  PlantedSpec s;
  s.num_classes = layout.num_classes;
  s.latent_dim = layout.latent_dim;
  s.initial_channels = layout.initial_channels;
  const auto nb = layout.blocks.size();
  if (nb == 0) throw bad_spec("at least one block is required");
  if (layout.num_classes < 2) throw bad_spec("num_classes must be >= 2");
  std::vector<Index> next(nb, 0);
  for (const auto& b : layout.blocks) {
    PlantedBlock pb;
    pb.channels = b.in_channels;
    pb.out_channels = b.out_channels;
    pb.planted.resize(static_cast<std::size_t>(layout.num_classes));
    s.blocks.push_back(std::move(pb));
  }
  auto take = [&](std::size_t b) {
    const Index c = next[b]++;
    if (c >= s.blocks[b].channels) throw bad_spec("channel roles exceed the channel count" + at_block(b));
    return c;
  };

  // quota[e][b]: planted channels class e still needs in block b.
  std::vector<std::vector<Index>> quota(static_cast<std::size_t>(layout.num_classes), std::vector<Index>(nb));
  for (auto& q : quota) {
    for (std::size_t b = 0; b < nb; ++b) {
      q[b] = layout.planted_per_class / static_cast<Index>(nb) +
             (static_cast<Index>(b) < layout.planted_per_class % static_cast<Index>(nb) ? 1 : 0);
    }
  }
  for (std::size_t p = 0; p < layout.overlaps.size(); ++p) {
    const auto& o = layout.overlaps[p];
    if (o.a < 0 || o.b < 0 || o.a >= layout.num_classes || o.b >= layout.num_classes || o.a == o.b || o.count < 0) {
      throw bad_spec("overlap entry " + std::to_string(p) + " names invalid classes");
    }
    auto& qa = quota[static_cast<std::size_t>(o.a)];
    auto& qb = quota[static_cast<std::size_t>(o.b)];
    for (Index t = 0; t < o.count; ++t) {
      bool placed = false;
      for (std::size_t step = 0; step < nb && !placed; ++step) {
        const std::size_t b = (p + static_cast<std::size_t>(t) + step) % nb;
        if (qa[b] > 0 && qb[b] > 0) {
          const Index c = take(b);
          s.blocks[b].planted[static_cast<std::size_t>(o.a)].push_back(c);
          s.blocks[b].planted[static_cast<std::size_t>(o.b)].push_back(c);
          --qa[b];
          --qb[b];
          placed = true;
        }
      }
      if (!placed) throw bad_spec("overlap entry " + std::to_string(p) + " exceeds the planted set size");
    }
  }
  for (std::size_t b = 0; b < nb; ++b) {
    for (std::size_t e = 0; e < quota.size(); ++e) {
      for (; quota[e][b] > 0; --quota[e][b]) s.blocks[b].planted[e].push_back(take(b));
      std::sort(s.blocks[b].planted[e].begin(), s.blocks[b].planted[e].end());
    }
    for (Index i = 0; i < layout.shared_per_block; ++i) s.blocks[b].shared.push_back(take(b));
    for (Index i = 0; i < layout.dead_per_block; ++i) s.blocks[b].dead.push_back(take(b));
  }
  s.validate();
  return s;
}

PlantedLayout default_planted_layout() {
  PlantedLayout l;
  l.overlaps = {{0, 1, 4}, {2, 3, 2}, {4, 5, 6}, {6, 7, 1}};
  return l;
}

PlantedSpec default_planted_spec(std::uint64_t seed) {
  PlantedSpec s = make_planted_spec(default_planted_layout());
  s.seed = seed;
  return s;
}

PlantedSpec diversity_suite_spec(std::uint64_t seed, double max_gate) {
  PlantedLayout layout = default_planted_layout();
  layout.overlaps.clear();
  PlantedSpec s = make_planted_spec(layout);
  s.seed = seed;
  s.stem_latent_scale = 0.0;
  const auto k = static_cast<std::size_t>(s.num_classes);
  // Fixed interleaving so gate strength is unrelated to class index.
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) order[i] = (i * 7 + 3) % k;
  s.shared_gates.assign(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    s.shared_gates[order[r]] = max_gate * static_cast<double>(r) / static_cast<double>(k - 1);
  }
  s.validate();
  return s;
}

PlantedSpec ungated_twin(const PlantedSpec& spec) {
  PlantedSpec t = spec;
  t.shared_gates.clear();
  return t;
}

const char* to_string(ChannelRole r) {
  switch (r) {
    case ChannelRole::planted:
      return "planted";
    case ChannelRole::suppressed:
      return "suppressed";
    case ChannelRole::shared:
      return "shared";
    case ChannelRole::dead:
      return "dead";
    case ChannelRole::background:
      return "background";
  }
  return "background";
}

GroundTruth ground_truth(const PlantedSpec& spec) {
  spec.validate();
  GroundTruth t;
  const double w = static_cast<float>(spec.latent_norm);
  for (Index e = 0; e < spec.num_classes; ++e) {
    std::vector<TruthBlock> blocks;
    double total = 0.0;
    std::vector<ChannelRef> planted;
    for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
      const Index c_count = spec.blocks[b].channels;
      TruthBlock tb;
      tb.mean_t = Eigen::VectorXd::Zero(c_count);
      tb.var_t = Eigen::VectorXd::Zero(c_count);
      for (Index c = 0; c < c_count; ++c) {
        const BetaRule r = beta_rule(spec, e, b, c);
        tb.roles.push_back(r.role);
        tb.mean_t[c] = -static_cast<double>(r.constant);
        if (r.role == ChannelRole::shared) tb.var_t[c] = w * w;
        if (r.role == ChannelRole::planted) planted.push_back({static_cast<Index>(b), c});
      }
      total += tb.mean_t.cwiseAbs().sum();
      blocks.push_back(std::move(tb));
    }
    t.classes.push_back(std::move(blocks));
    t.total_awareness.push_back(total);
    t.planted.push_back(std::move(planted));
  }
  t.k = static_cast<Index>(t.planted.front().size());
  t.overlap = Eigen::MatrixXd::Zero(spec.num_classes, spec.num_classes);
  for (Index i = 0; i < spec.num_classes; ++i) {
    for (Index j = 0; j < spec.num_classes; ++j) {
      std::vector<ChannelRef> common;
      const auto& a = t.planted[static_cast<std::size_t>(i)];
      const auto& b = t.planted[static_cast<std::size_t>(j)];
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      t.overlap(i, j) = static_cast<double>(common.size()) / static_cast<double>(t.k);
    }
  }
  for (const auto& blk : spec.blocks) {
    t.shared.push_back(blk.shared);
    Index min_planted = blk.channels;
    for (const auto& p : blk.planted) min_planted = std::min(min_planted, static_cast<Index>(p.size()));
    t.planted_per_block.push_back(min_planted);
  }
  return t;
}

PlantedModel build_planted(const PlantedSpec& spec) {
  spec.validate();
  const GeneratorSpec gs = spec.generator_spec();
  GeneratorWeights w = GeneratorWeights::zeros(gs);
  const Index k = spec.num_classes, dz = spec.latent_dim, cd = gs.conditioning_dim();

  for (Index e = 0; e < k; ++e) w.embedding.data()[e * k + e] = 1.0f;

  Rng stem_rng(spec.seed, Stream::weights, 0);
  for (Index r = 0; r < w.stem_weight.dim(0); ++r) {
    for (Index c = 0; c < cd; ++c) {
      const double scale = c < dz ? spec.stem_latent_scale : spec.stem_class_scale;
      w.stem_weight.data()[r * cd + c] = static_cast<float>(scale * stem_rng.normal());
    }
  }

  for (std::size_t b = 0; b < spec.blocks.size(); ++b) {
    const auto& blk = spec.blocks[b];
    auto& bw = w.blocks[b];
    for (Index c = 0; c < blk.channels; ++c) {
      for (Index e = 0; e < k; ++e) {
        const BetaRule r = beta_rule(spec, e, b, c);
        bw.beta_weight.data()[c * cd + dz + e] = r.constant;
        if (r.latent_index >= 0) bw.beta_weight.data()[c * cd + r.latent_index] = static_cast<float>(spec.latent_norm);
      }
    }

    const Index cin = blk.channels, cout = blk.out_channels;
    Rng rng(spec.seed, Stream::weights, b + 1);
    const double sd = spec.conv_scale / std::sqrt(9.0 * static_cast<double>(cin));
    for (Index i = 0; i < bw.conv_weight.size(); ++i) bw.conv_weight.data()[i] = static_cast<float>(sd * rng.normal());

    // Orthonormal stamps for every channel planted for some class.
    std::set<Index> planted;
    for (const auto& p : blk.planted) planted.insert(p.begin(), p.end());
    const Index np = static_cast<Index>(planted.size()), rows = cout * 9;
    if (np > rows) throw bad_spec("more planted channels than stamp dimensions" + at_block(b));
    if (np > 0) {
      Eigen::MatrixXd gauss(rows, np);
      for (Index j = 0; j < np; ++j) {
        for (Index i = 0; i < rows; ++i) gauss(i, j) = rng.normal();
      }
      const Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
      const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(rows, np);
      Index j = 0;
      for (Index c : planted) {
        for (Index o = 0; o < cout; ++o) {
          for (Index t = 0; t < 9; ++t) {
            bw.conv_weight.data()[(o * cin + c) * 9 + t] = static_cast<float>(spec.stamp_gain * q(o * 9 + t, j));
          }
        }
        ++j;
      }
    }
  }

  Rng out_rng(spec.seed, Stream::weights, spec.blocks.size() + 1);
  const double sd = spec.output_scale / std::sqrt(9.0 * static_cast<double>(spec.blocks.back().out_channels));
  for (Index i = 0; i < w.output_weight.size(); ++i) w.output_weight.data()[i] = static_cast<float>(sd * out_rng.normal());

  return {Generator(gs, std::move(w)), ground_truth(spec)};
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const VerificationCheck& c) { return c.passed; });
}

VerificationReport verify_against_ground_truth(const Generator& g, const GroundTruth& truth, Index n,
                                               std::uint64_t seed, const VerificationTolerances& tol,
                                               unsigned workers) {
  if (n < 1000) throw bad_param("verification needs at least 1,000 samples");
  const Index k_classes = static_cast<Index>(truth.classes.size());
  if (k_classes != g.spec().num_classes) throw bad_param("ground truth does not match the generator's class count");
  VerificationReport report;
  for (Index e = 0; e < k_classes; ++e) report.tables.push_back(estimate_awareness(g, e, {n, seed, workers}));

  Index within = 0, total = 0;
  double worst_var = 0.0;
  bool any_shared = false;
  for (Index e = 0; e < k_classes; ++e) {
    for (std::size_t b = 0; b < truth.classes[0].size(); ++b) {
      const auto& tb = truth.classes[static_cast<std::size_t>(e)][b];
      const auto& est = report.tables[static_cast<std::size_t>(e)].blocks[b];
      for (Index c = 0; c < tb.mean_t.size(); ++c) {
        const double bound = tol.standard_errors * std::sqrt(tb.var_t[c] / static_cast<double>(n));
        ++total;
        if (std::abs(est.mean_t[c] - tb.mean_t[c]) <= bound) ++within;
        if (tb.roles[static_cast<std::size_t>(c)] == ChannelRole::shared) {
          any_shared = true;
          worst_var = std::max(worst_var, std::abs(est.var_t[c] - tb.var_t[c]) / tb.var_t[c]);
        }
      }
    }
  }
  const double frac = static_cast<double>(within) / static_cast<double>(total);
  report.checks.push_back({"mean_t_within_standard_errors", frac >= tol.min_mean_fraction, frac,
                           std::to_string(within) + " of " + std::to_string(total) + " channels"});
  if (any_shared) {
    report.checks.push_back({"shared_var_t_relative_error", worst_var <= tol.shared_var_relative, worst_var,
                             "worst relative error of var_t on shared channels"});
  }

  double worst_recovery = 1.0;
  std::vector<ChannelSet> tops;
  for (Index e = 0; e < k_classes; ++e) {
    ChannelSet s = top_k_channels(report.tables[static_cast<std::size_t>(e)], Criterion::category, Direction::top, truth.k);
    std::vector<ChannelRef> got = s.channels;
    std::sort(got.begin(), got.end());
    std::vector<ChannelRef> hit;
    const auto& want = truth.planted[static_cast<std::size_t>(e)];
    std::set_intersection(got.begin(), got.end(), want.begin(), want.end(), std::back_inserter(hit));
    worst_recovery = std::min(worst_recovery, static_cast<double>(hit.size()) / static_cast<double>(want.size()));
    tops.push_back(std::move(s));
  }
  report.checks.push_back({"top_k_recovery", worst_recovery == 1.0, worst_recovery,
                           "minimum precision (= recall) of top-k category channels over classes"});

  Index mismatches = 0;
  for (Index i = 0; i < k_classes; ++i) {
    for (Index j = 0; j < k_classes; ++j) {
      if (channel_overlap(tops[static_cast<std::size_t>(i)], tops[static_cast<std::size_t>(j)]) != truth.overlap(i, j)) {
        ++mismatches;
      }
    }
  }
  report.checks.push_back({"overlap_exact", mismatches == 0, static_cast<double>(mismatches), "mismatching class pairs"});

  // Per-block intersections across all classes.
  Index latent_errors = 0, category_common = 0;
  for (std::size_t b = 0; b < truth.shared.size(); ++b) {
    const auto blk = static_cast<Index>(b);
    auto intersect = [&](Criterion crit, Index k) {
      std::vector<ChannelRef> acc;
      for (Index e = 0; e < k_classes; ++e) {
        auto set = top_k_channels(report.tables[static_cast<std::size_t>(e)], crit, Direction::top, k, blk).channels;
        std::sort(set.begin(), set.end());
        if (e == 0) {
          acc = set;
          continue;
        }
        std::vector<ChannelRef> next;
        std::set_intersection(acc.begin(), acc.end(), set.begin(), set.end(), std::back_inserter(next));
        acc = std::move(next);
      }
      return acc;
    };
    const auto& shared = truth.shared[b];
    if (!shared.empty()) {
      const auto got = intersect(Criterion::latent, static_cast<Index>(shared.size()));
      std::vector<ChannelRef> want;
      for (Index c : shared) want.push_back({blk, c});
      std::sort(want.begin(), want.end());
      if (got != want) ++latent_errors;
    }
    if (truth.planted_per_block[b] > 0) {
      category_common += static_cast<Index>(intersect(Criterion::category, truth.planted_per_block[b]).size());
    }
  }
  report.checks.push_back({"latent_intersection_equals_shared", latent_errors == 0, static_cast<double>(latent_errors),
                           "blocks whose latent-criterion intersection differs from the shared set"});
  bool some_channel_planted_everywhere = false;
  for (std::size_t b = 0; b < truth.shared.size(); ++b) {
    for (Index c = 0; c < static_cast<Index>(truth.classes[0][b].roles.size()); ++c) {
      bool all = true;
      for (Index e = 0; e < k_classes && all; ++e) {
        all = truth.classes[static_cast<std::size_t>(e)][b].roles[static_cast<std::size_t>(c)] == ChannelRole::planted;
      }
      some_channel_planted_everywhere |= all;
    }
  }
  if (!some_channel_planted_everywhere) {
    report.checks.push_back({"category_intersection_empty", category_common == 0, static_cast<double>(category_common),
                             "channels common to every class's per-block top category set"});
  }
  return report;
}

nlohmann::ordered_json to_json(const PlantedSpec& s) {
  nlohmann::ordered_json j;
  j["num_classes"] = s.num_classes;
  j["latent_dim"] = s.latent_dim;
  j["initial_channels"] = s.initial_channels;
  auto blocks = nlohmann::ordered_json::array();
  for (const auto& b : s.blocks) {
    blocks.push_back({{"channels", b.channels},
                      {"out_channels", b.out_channels},
                      {"planted", b.planted},
                      {"shared", b.shared},
                      {"dead", b.dead}});
  }
  j["blocks"] = blocks;
  j["b_active"] = s.b_active;
  j["b_suppressed"] = s.b_suppressed;
  j["b_dead"] = s.b_dead;
  j["b_background"] = s.b_background;
  j["latent_norm"] = s.latent_norm;
  j["shared_gates"] = s.shared_gates;
  j["seed"] = s.seed;
  j["stem_class_scale"] = s.stem_class_scale;
  j["stem_latent_scale"] = s.stem_latent_scale;
  j["conv_scale"] = s.conv_scale;
  j["stamp_gain"] = s.stamp_gain;
  j["output_scale"] = s.output_scale;
  return j;
}

PlantedSpec planted_spec_from_json(const nlohmann::json& j) {
  PlantedSpec s;
  try {
    if (j.contains("layout")) {
      const auto& l = j["layout"];
      PlantedLayout layout = default_planted_layout();
      layout.num_classes = l.value("num_classes", layout.num_classes);
      layout.latent_dim = l.value("latent_dim", layout.latent_dim);
      layout.initial_channels = l.value("initial_channels", layout.initial_channels);
      if (l.contains("blocks")) {
        layout.blocks.clear();
        for (const auto& b : l["blocks"]) layout.blocks.push_back({b.at(0).get<Index>(), b.at(1).get<Index>()});
      }
      layout.planted_per_class = l.value("planted_per_class", layout.planted_per_class);
      layout.shared_per_block = l.value("shared_per_block", layout.shared_per_block);
      layout.dead_per_block = l.value("dead_per_block", layout.dead_per_block);
      if (l.contains("overlaps")) {
        layout.overlaps.clear();
        for (const auto& o : l["overlaps"]) {
          layout.overlaps.push_back({o.at(0).get<Index>(), o.at(1).get<Index>(), o.at(2).get<Index>()});
        }
      }
      s = make_planted_spec(layout);
    } else {
      s.num_classes = j.at("num_classes").get<Index>();
      s.latent_dim = j.at("latent_dim").get<Index>();
      s.initial_channels = j.at("initial_channels").get<Index>();
      for (const auto& b : j.at("blocks")) {
        PlantedBlock pb;
        pb.channels = b.at("channels").get<Index>();
        pb.out_channels = b.at("out_channels").get<Index>();
        pb.planted = b.at("planted").get<std::vector<std::vector<Index>>>();
        pb.shared = b.value("shared", std::vector<Index>{});
        pb.dead = b.value("dead", std::vector<Index>{});
        s.blocks.push_back(std::move(pb));
      }
    }
    s.b_active = j.value("b_active", s.b_active);
    s.b_suppressed = j.value("b_suppressed", s.b_suppressed);
    s.b_dead = j.value("b_dead", s.b_dead);
    s.b_background = j.value("b_background", s.b_background);
    s.latent_norm = j.value("latent_norm", s.latent_norm);
    s.shared_gates = j.value("shared_gates", s.shared_gates);
    s.seed = j.value("seed", s.seed);
    s.stem_class_scale = j.value("stem_class_scale", s.stem_class_scale);
    s.stem_latent_scale = j.value("stem_latent_scale", s.stem_latent_scale);
    s.conv_scale = j.value("conv_scale", s.conv_scale);
    s.stamp_gain = j.value("stamp_gain", s.stamp_gain);
    s.output_scale = j.value("output_scale", s.output_scale);
  } catch (const nlohmann::json::exception& e) {
    throw bad_spec(std::string("malformed planted spec: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::ordered_json to_json(const GroundTruth& t) {
  nlohmann::ordered_json j;
  j["k"] = t.k;
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < t.classes.size(); ++e) {
    nlohmann::ordered_json c;
    c["class_id"] = e;
    c["total_awareness"] = t.total_awareness[e];
    auto layers = nlohmann::ordered_json::array();
    for (std::size_t b = 0; b < t.classes[e].size(); ++b) {
      const auto& tb = t.classes[e][b];
      std::vector<std::string> roles;
      for (auto r : tb.roles) roles.emplace_back(to_string(r));
      layers.push_back({{"block", b},
                        {"mean_t", std::vector<double>(tb.mean_t.data(), tb.mean_t.data() + tb.mean_t.size())},
                        {"var_t", std::vector<double>(tb.var_t.data(), tb.var_t.data() + tb.var_t.size())},
                        {"roles", roles}});
    }
    c["layers"] = layers;
    auto planted = nlohmann::ordered_json::array();
    for (const auto& r : t.planted[e]) planted.push_back({r.block, r.channel});
    c["planted"] = planted;
    classes.push_back(std::move(c));
  }
  j["classes"] = classes;
  auto overlap = nlohmann::ordered_json::array();
  for (Index i = 0; i < t.overlap.rows(); ++i) {
    std::vector<double> row;
    for (Index k = 0; k < t.overlap.cols(); ++k) row.push_back(t.overlap(i, k));
    overlap.push_back(row);
  }
  j["overlap"] = overlap;
  j["shared"] = t.shared;
  return j;
}

nlohmann::ordered_json to_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["passed"] = r.passed();
  auto checks = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"detail", c.detail}});
  }
  j["checks"] = checks;
  return j;
}

}  // namespace awarekit
