#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "turbstab/image.hpp"

namespace turbstab {

struct SimConfig {
  int frames = 20;
  double deform_amplitude = 1.5;    // pixels, RMS displacement
  double correlation_length = 8.0;  // pixels, smoothness of the fields
  double blur_sigma = 0.5;          // pixels
  double noise_sigma = 0.01;        // intensity units on [0,1]
  std::uint64_t seed = 1234;

  void validate() const;
};

/// Smooth zero-mean random displacement field with RMS magnitude == amplitude.
FlowField gen_deformation(int width, int height, double amplitude, double correlation_length,
                          std::mt19937_64& rng);

/// Separable Gaussian convolution, kernel truncated at +-ceil(3*sigma),
/// normalized to sum 1, replicate boundary. sigma = 0 is the identity.
Image gaussian_blur(const Image& image, double sigma);

struct DegradeResult {
  FrameSequence frames;
  std::vector<FlowField> fields;  // the deformations actually applied
};

/// f_i = clamp(warp_apply(gaussian_blur(truth), D_i) + noise, [0,1]).
/// Deterministic given cfg.seed; one RNG stream per frame.
DegradeResult degrade(const Image& truth, const SimConfig& cfg);

}  // namespace turbstab
