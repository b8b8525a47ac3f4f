#pragma once

#include "turbstab/image.hpp"

namespace turbstab {

struct FlowParams {
  int window_radius = 5;
  int pyramid_levels = 3;
  int iterations_per_level = 3;
  double min_eigen_threshold = 1e-6;  // per-pixel structure-tensor floor on [0,1] intensities

  void validate() const;
};

/// 2x2 box average; output dims = floor(dims / 2).
Image downsample2(const Image& image);

/// Dense pyramidal Lucas-Kanade: returns phi with warp_apply(reference, phi) ~ target.
/// Coarse-to-fine, box-filter pyramid, windowed least squares per pixel; windows whose
/// structure tensor is below min_eigen_threshold keep their incoming flow.
FlowField estimate_flow(const Image& reference, const Image& target, const FlowParams& params);

}  // namespace turbstab
