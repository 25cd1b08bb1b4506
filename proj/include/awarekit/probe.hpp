#pragma once

#include <cmath>
#include <cstdint>

namespace awarekit {

/// |gamma| below this marks a channel inactive; its probe is undefined and reported as 0.
inline constexpr float kGammaEpsilon = 1e-8f;

enum class GammaSign : std::int8_t { positive, negative, inactive };

/// The normalized-input cutoff below which ReLU(gamma * x + beta) is zero (cut direction flips when
/// gamma < 0).
struct ChannelProbe {
  float t = 0.0f;
  GammaSign gamma_sign = GammaSign::inactive;
};

inline ChannelProbe channel_probe(float gamma, float beta) {
  if (!(std::fabs(gamma) >= kGammaEpsilon)) return {0.0f, GammaSign::inactive};
  return {-beta / gamma, gamma > 0.0f ? GammaSign::positive : GammaSign::negative};
}

}  // namespace awarekit
