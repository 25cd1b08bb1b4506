#pragma once

#include "awarekit/awareness.hpp"
#include "awarekit/generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace awarekit {

struct PlantedBlock {
  Index channels = 64;
  Index out_channels = 64;
  std::vector<std::vector<Index>> planted;  // per class
  std::vector<Index> shared;
  std::vector<Index> dead;
};

/// A generator whose channel roles are known in closed form. gamma is identically 1 and
/// beta[c] for class e is
///   b_active       on the class's own planted channels
///   b_suppressed   on channels planted for other classes only
///   b_dead         on dead channels
///   latent_norm * z[u] + shared_gates[e]   on shared channel number u of the block
///   b_background   everywhere else.
struct PlantedSpec {
  Index num_classes = 16;
  Index latent_dim = 16;
  Index initial_channels = 64;
  std::vector<PlantedBlock> blocks;

  double b_active = 2.0;
  double b_suppressed = -2.0;
  double b_dead = -6.0;
  double b_background = 0.0;
  double latent_norm = 1.0;
  std::vector<double> shared_gates;  // per class; empty = all zero

  // Seed-dependent parts: stem, convolutions and stamps.
  std::uint64_t seed = 0;
  double stem_class_scale = 1.0;
  double stem_latent_scale = 0.5;
  double conv_scale = 1.0;
  double stamp_gain = 3.0;
  double output_scale = 1.0;

  /// Throws Error("bad_spec") naming the violated invariant.
  void validate() const;
  GeneratorSpec generator_spec() const;
  double gate(Index class_id) const;
};

struct PairOverlap {
  Index a = 0;
  Index b = 0;
  Index count = 0;
};

struct PlantedLayout {
  Index num_classes = 16;
  Index latent_dim = 16;
  Index initial_channels = 64;
  std::vector<BlockShape> blocks{{64, 64}, {64, 64}, {64, 16}};
  Index planted_per_class = 8;  // spread over blocks round-robin
  Index shared_per_block = 4;
  Index dead_per_block = 8;
  std::vector<PairOverlap> overlaps;
};

/// Allocates channel roles: fresh channels for every prescribed pair overlap first, then exclusive planted
/// channels, then shared and dead channels, each block drawing from its own pool in index order.
PlantedSpec make_planted_spec(const PlantedLayout& layout);

/// K = 16, three 64-channel blocks, 8 planted channels per class, 4 shared and 8 dead channels per block,
/// with a few prescribed pairwise overlaps.
PlantedLayout default_planted_layout();
PlantedSpec default_planted_spec(std::uint64_t seed = 0);

/// Variant whose class diversity is graded: shared-channel gates fall from 0 to `max_gate` over a fixed
/// permutation of the classes, and the stem ignores z so only shared channels carry latent variation.
PlantedSpec diversity_suite_spec(std::uint64_t seed = 0, double max_gate = -6.0);
/// The same generator with all gates open, used as the real-data proxy for the diversity suite.
PlantedSpec ungated_twin(const PlantedSpec& spec);

enum class ChannelRole { planted, suppressed, shared, dead, background };
const char* to_string(ChannelRole r);

struct TruthBlock {
  Eigen::VectorXd mean_t;
  Eigen::VectorXd var_t;
  std::vector<ChannelRole> roles;
};

struct GroundTruth {
  std::vector<std::vector<TruthBlock>> classes;  // [class][block]
  std::vector<double> total_awareness;
  Index k = 0;                    // planted channels per class
  Eigen::MatrixXd overlap;        // |P_i ∩ P_j| / k
  std::vector<std::vector<ChannelRef>> planted;  // per class, sorted
  std::vector<std::vector<Index>> shared;        // per block
  std::vector<Index> planted_per_block;          // min over classes, per block
};

struct PlantedModel {
  Generator generator;
  GroundTruth truth;
};

PlantedModel build_planted(const PlantedSpec& spec);
GroundTruth ground_truth(const PlantedSpec& spec);

struct VerificationCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  std::string detail;
};

struct VerificationTolerances {
  double standard_errors = 4.0;
  double min_mean_fraction = 0.99;
  double shared_var_relative = 0.10;
};

struct VerificationReport {
  std::vector<VerificationCheck> checks;
  std::vector<AwarenessTable> tables;
  bool passed() const;
};

VerificationReport verify_against_ground_truth(const Generator& g, const GroundTruth& truth, Index n,
                                               std::uint64_t seed, const VerificationTolerances& tol = {},
                                               unsigned workers = 0);

nlohmann::ordered_json to_json(const PlantedSpec& spec);
PlantedSpec planted_spec_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const GroundTruth& truth);
nlohmann::ordered_json to_json(const VerificationReport& report);

}  // namespace awarekit
