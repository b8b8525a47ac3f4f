#include "turbstab/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace turbstab {

double rmse(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("rmse: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.data.size()));
}

double psnr(const Image& a, const Image& b) {
  const double e = rmse(a, b);
  if (e == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(1.0 / e);
}

double fidelity(const Image& u, const FrameSequence& frames, const std::vector<FlowField>& flows) {
  if (frames.empty()) throw std::invalid_argument("fidelity: empty frame sequence");
  if (frames.size() != flows.size()) throw std::invalid_argument("fidelity: frames/flows count mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].same_shape(u) || !flows[i].same_shape(u))
      throw std::invalid_argument("fidelity: shape mismatch");
    const Image warped = warp_apply(u, flows[i]);
    for (std::size_t k = 0; k < warped.data.size(); ++k) {
      const double d = warped.data[k] - frames[i].data[k];
      s += d * d;
    }
  }
  return s / (static_cast<double>(frames.size()) * static_cast<double>(u.size()));
}

double flow_epe(const std::vector<FlowField>& estimated, const std::vector<FlowField>& truth) {
  if (estimated.size() != truth.size() || estimated.empty())
    throw std::invalid_argument("flow_epe: count mismatch or empty");
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < estimated.size(); ++i) {
    const FlowField& e = estimated[i];
    const FlowField& t = truth[i];
    if (e.width != t.width || e.height != t.height)
      throw std::invalid_argument("flow_epe: shape mismatch");
    for (std::size_t k = 0; k < e.size(); ++k)
      s += std::hypot(e.dx[k] - t.dx[k], e.dy[k] - t.dy[k]);
    n += e.size();
  }
  return s / static_cast<double>(n);
}

}  // namespace turbstab
