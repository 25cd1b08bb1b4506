#pragma once

#include "awarekit/awareness.hpp"
#include "awarekit/generator.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace awarekit {

struct VolumeSource {
  Index block = 0;
  Index first_channel = 0;  // offset within the volume
  Index channels = 0;
};

struct FeatureVolume {
  Tensor data;  // C' x H' x W'
  std::vector<VolumeSource> sources;
};

/// Bilinear resize with half-pixel centers and edge clamping.
Tensor resize_bilinear(const Tensor& input, Index height, Index width);

enum class LayerSelection { all, second_half, explicit_list };

/// Block indices for a selection. second_half keeps the last ceil(B/2) blocks.
std::vector<Index> select_blocks(Index num_blocks, LayerSelection selection, const std::vector<Index>& explicit_blocks = {});
LayerSelection parse_layer_selection(const std::string& s);

/// Post-ReLU features of the selected blocks, resized to `size` x `size` and stacked in block order.
FeatureVolume collect_feature_volume(const ForwardTrace& trace, const std::vector<Index>& blocks, Index size);

/// Per-block min-max normalized category awareness for each volume channel; constant-range blocks map to 1.
Eigen::VectorXf awareness_weights(const FeatureVolume& volume, const AwarenessTable& table);

FeatureVolume weight_by_awareness(const FeatureVolume& volume, const AwarenessTable& table);

struct KMeansOptions {
  Index k = 3;
  std::uint64_t seed = 0;
  Index max_iter = 100;
  double tol = 1e-4;
};

struct SegmentationResult {
  Index height = 0;
  Index width = 0;
  Index k = 0;
  std::vector<Index> labels;  // row-major H x W
  std::vector<Index> counts;
  std::uint64_t seed = 0;
  Index iterations = 0;
  double inertia = 0.0;
  /// Inertia after each assignment step.
  std::vector<double> inertia_history;
};

SegmentationResult kmeans_segment(const FeatureVolume& volume, const KMeansOptions& options);

/// Fraction of pixels on which `labels` agrees with `truth` under the best label permutation.
double permutation_agreement(const std::vector<Index>& labels, const std::vector<Index>& truth, Index k);

struct SegmentRequest {
  Index class_id = 0;
  std::uint64_t seed = 0;  // selects the latent (draw 0) and seeds awareness and k-means
  Index k = 3;
  LayerSelection layers = LayerSelection::all;
  bool weighted = true;
  Index samples = 256;  // awareness samples for weighting
};

/// Synthesizes the seeded image of a class and clusters its (optionally awareness-weighted) feature volume.
SegmentationResult segment_class(const Generator& g, const SegmentRequest& request);

nlohmann::ordered_json to_json(const SegmentationResult& r, bool include_labels = true);

}  // namespace awarekit
