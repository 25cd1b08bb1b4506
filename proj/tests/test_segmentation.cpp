#include "helpers.hpp"

#include "awarekit/error.hpp"
#include "awarekit/segmentation.hpp"

#include <doctest.h>

using namespace awarekit;
using awarekit::testing::random_tensor;
using awarekit::testing::small_planted;

namespace {

// Vertical bands of `regions` equal widths with distinct channel means plus noise.
std::pair<FeatureVolume, std::vector<Index>> banded_volume(Index regions, Index size, float noise, std::uint64_t seed) {
  FeatureVolume v;
  v.data = random_tensor({4, size, size}, seed, noise);
  v.sources = {{0, 0, 4}};
  std::vector<Index> truth(static_cast<std::size_t>(size * size));
  for (Index y = 0; y < size; ++y) {
    for (Index x = 0; x < size; ++x) {
      const Index r = x * regions / size;
      truth[static_cast<std::size_t>(y * size + x)] = r;
      for (Index c = 0; c < 4; ++c) v.data.at(c, y, x) += static_cast<float>(((r + c) % regions) * 2);
    }
  }
  return {v, truth};
}

}  // namespace

TEST_CASE("bilinear resize: identity at equal size and constant preservation") {
  const Tensor t = random_tensor({2, 5, 5}, 3);
  CHECK(bit_equal(resize_bilinear(t, 5, 5), t));
  const Tensor c = Tensor::constant({1, 4, 4}, 2.5f);
  CHECK(resize_bilinear(c, 16, 16).data().isConstant(2.5f, 1e-6f));
  Tensor ramp({1, 1, 2});
  ramp.at(0, 0, 0) = 0.0f;
  ramp.at(0, 0, 1) = 1.0f;
  const Tensor up = resize_bilinear(ramp, 1, 4);
  CHECK(up.at(0, 0, 0) == 0.0f);
  CHECK(up.at(0, 0, 1) == doctest::Approx(0.25));
  CHECK(up.at(0, 0, 2) == doctest::Approx(0.75));
  CHECK(up.at(0, 0, 3) == 1.0f);
}

TEST_CASE("layer selection") {
  CHECK(select_blocks(4, LayerSelection::second_half) == std::vector<Index>{2, 3});
  CHECK(select_blocks(3, LayerSelection::second_half) == std::vector<Index>{1, 2});
  CHECK(select_blocks(3, LayerSelection::all) == std::vector<Index>{0, 1, 2});
  CHECK(select_blocks(3, LayerSelection::explicit_list, {2}) == std::vector<Index>{2});
  CHECK_THROWS_AS(select_blocks(3, LayerSelection::explicit_list, {3}), Error);
  CHECK(parse_layer_selection("second-half") == LayerSelection::second_half);
  CHECK_THROWS_AS(parse_layer_selection("half"), Error);
}

TEST_CASE("feature volume stacks resized blocks") {
  const Generator& g = small_planted().generator;
  const ForwardResult r = forward(g, {sample_latent(g.spec().latent_dim, 1, 0), 0});
  const Index out = g.spec().output_resolution();
  const FeatureVolume v = collect_feature_volume(r.trace, {0, 1}, out);
  CHECK(v.data.shape() == std::vector<Index>{16 + 16, out, out});
  CHECK(v.sources[1].first_channel == 16);
  const Index native = g.spec().block_resolution(1);
  const FeatureVolume same = collect_feature_volume(r.trace, {1}, native);
  CHECK(bit_equal(same.data, r.trace.blocks[1].post_relu));
}

TEST_CASE("awareness weights: min-max per block, constant range maps to one") {
  const Generator& g = small_planted().generator;
  const ForwardResult r = forward(g, {sample_latent(g.spec().latent_dim, 1, 0), 0});
  const FeatureVolume v = collect_feature_volume(r.trace, {0, 1}, 16);
  AwarenessTable t = estimate_awareness(g, 0, {100, 1});
  const Eigen::VectorXf w = awareness_weights(v, t);
  CHECK(w.minCoeff() == 0.0f);
  CHECK(w.maxCoeff() == 1.0f);
  Index argmin = 0;
  t.blocks[0].mean_t.maxCoeff(&argmin);
  CHECK(weight_by_awareness(v, t).data.channel(argmin).isZero(0.0f));

  AwarenessTable flat = t;
  for (auto& b : flat.blocks) b.mean_t.setConstant(-1.0);
  CHECK(awareness_weights(v, flat).isOnes(0.0f));

  const AwarenessTable back = awareness_from_json(nlohmann::json::parse(to_json(t).dump()));
  CHECK(bit_equal(weight_by_awareness(v, back).data, weight_by_awareness(v, t).data));
}

TEST_CASE("k-means separates constant regions exactly") {
  FeatureVolume v;
  v.data = Tensor({2, 6, 6});
  std::vector<Index> truth(36);
  for (Index y = 0; y < 6; ++y) {
    for (Index x = 0; x < 6; ++x) {
      const bool right = x >= 3;
      truth[static_cast<std::size_t>(y * 6 + x)] = right;
      v.data.at(0, y, x) = right ? 4.0f : -1.0f;
      v.data.at(1, y, x) = right ? 1.0f : 0.0f;
    }
  }
  const SegmentationResult r = kmeans_segment(v, {2, 0});
  CHECK(permutation_agreement(r.labels, truth, 2) == 1.0);
  CHECK(r.counts == std::vector<Index>{18, 18});
  CHECK(r.inertia == doctest::Approx(0.0));
}

TEST_CASE("k-means on three noisy bands: agreement, monotone inertia, determinism") {
  const auto [v, truth] = banded_volume(3, 24, 0.6f, 17);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const SegmentationResult r = kmeans_segment(v, {3, seed});
    CHECK(permutation_agreement(r.labels, truth, 3) >= 0.95);
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i) {
      CHECK(r.inertia_history[i] <= r.inertia_history[i - 1] * (1.0 + 1e-12));
    }
    const SegmentationResult again = kmeans_segment(v, {3, seed});
    CHECK(again.labels == r.labels);
    CHECK(again.inertia == r.inertia);
    CHECK(again.inertia_history == r.inertia_history);
  }
}

TEST_CASE("k-means preconditions") {
  const auto [v, truth] = banded_volume(2, 8, 0.1f, 1);
  CHECK_THROWS_AS(kmeans_segment(v, {1, 0}), Error);
  CHECK_THROWS_AS(kmeans_segment(v, {2, 0, 0}), Error);
  FeatureVolume flat;
  flat.data = Tensor::constant({1, 4, 4}, 1.0f);
  CHECK_THROWS_AS(kmeans_segment(flat, {2, 0}), Error);
}

TEST_CASE("permutation agreement") {
  CHECK(permutation_agreement({0, 0, 1, 1}, {1, 1, 0, 0}, 2) == 1.0);
  CHECK(permutation_agreement({0, 1, 1, 1}, {1, 1, 0, 0}, 2) == 0.75);
  CHECK_THROWS_AS(permutation_agreement({0}, {0, 1}, 2), Error);
}

TEST_CASE("segment_class is deterministic and honours k bounds") {
  const Generator& g = small_planted().generator;
  SegmentRequest req;
  req.class_id = 1;
  req.seed = 4;
  req.samples = 64;
  const SegmentationResult a = segment_class(g, req);
  const SegmentationResult b = segment_class(g, req);
  CHECK(a.labels == b.labels);
  CHECK(a.height == g.spec().output_resolution());
  req.weighted = false;
  CHECK_NOTHROW(segment_class(g, req));
  req.k = 17;
  CHECK_THROWS_AS(segment_class(g, req), Error);
  req.k = 1;
  CHECK_THROWS_AS(segment_class(g, req), Error);
}
