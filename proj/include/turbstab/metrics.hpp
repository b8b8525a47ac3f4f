#pragma once

#include <optional>
#include <vector>

#include "turbstab/image.hpp"

namespace turbstab {

struct MetricReport {
  double rmse = 0.0;
  double psnr = 0.0;  // dB, peak 1.0; +inf when rmse == 0
  std::optional<double> flow_epe;
};

double rmse(const Image& a, const Image& b);

/// 20*log10(1/rmse), peak 1.0; returns +inf when rmse is 0.
double psnr(const Image& a, const Image& b);

/// sum_i ||warp_apply(u, phi_i) - f_i||^2 / (N * pixels).
double fidelity(const Image& u, const FrameSequence& frames, const std::vector<FlowField>& flows);

/// Mean endpoint error over frames and pixels.
double flow_epe(const std::vector<FlowField>& estimated, const std::vector<FlowField>& truth);

}  // namespace turbstab
