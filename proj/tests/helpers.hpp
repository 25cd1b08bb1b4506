#pragma once

#include "awarekit/generator.hpp"
#include "awarekit/planted.hpp"
#include "awarekit/random.hpp"

#include <filesystem>
#include <string>

namespace awarekit::testing {

inline Tensor random_tensor(std::vector<Index> shape, std::uint64_t seed, float scale = 1.0f) {
  Tensor t(std::move(shape));
  Rng rng(seed, Stream::test_noise);
  for (Index i = 0; i < t.size(); ++i) t.data()[i] = static_cast<float>(rng.normal()) * scale;
  return t;
}

/// A small planted generator: 4 classes, two 16-channel blocks.
inline PlantedSpec small_planted_spec(std::uint64_t seed = 0) {
  PlantedLayout layout;
  layout.num_classes = 4;
  layout.latent_dim = 8;
  layout.initial_channels = 16;
  layout.blocks = {{16, 16}, {16, 8}};
  layout.planted_per_class = 4;
  layout.shared_per_block = 2;
  layout.dead_per_block = 2;
  layout.overlaps = {{0, 1, 1}};
  PlantedSpec spec = make_planted_spec(layout);
  spec.seed = seed;
  return spec;
}

inline const PlantedModel& small_planted() {
  static const PlantedModel model = build_planted(small_planted_spec());
  return model;
}

inline const PlantedModel& default_planted() {
  static const PlantedModel model = build_planted(default_planted_spec(0));
  return model;
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("awarekit_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace awarekit::testing
