#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>

namespace awarekit {

/// Named substreams so that, e.g., random channel baselines never share draws with latent sampling.
enum class Stream : std::uint64_t {
  latent = 1,
  channel_choice = 2,
  weights = 3,
  image_pairs = 4,
  kmeans = 5,
  test_noise = 6,
  reference = 7,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seed for item `index` of `stream` under the user seed.
std::uint64_t derive_seed(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

/// Portable seeded generator: mt19937_64 with explicit uniform and Box-Muller normal transforms,
/// so draws do not depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0) : engine_(derive_seed(seed, stream, index)) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();

  Eigen::VectorXf normal_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Standard-normal latent vector for draw `index` under `seed`; identical for every class.
Eigen::VectorXf sample_latent(Eigen::Index latent_dim, std::uint64_t seed, std::uint64_t index);

}  // namespace awarekit
