#pragma once

#include <cmath>

#include "test_rng.hpp"
#include "turbstab/image.hpp"

namespace turbstab_test {

inline turbstab::Image random_image(TestRng& rng, int w, int h, double lo = 0.0, double hi = 1.0) {
  turbstab::Image img(w, h);
  for (double& v : img.data) v = rng.uniform(lo, hi);
  return img;
}

inline turbstab::FlowField random_flow(TestRng& rng, int w, int h, double max_disp) {
  turbstab::FlowField f(w, h);
  for (double& v : f.dx) v = rng.uniform(-max_disp, max_disp);
  for (double& v : f.dy) v = rng.uniform(-max_disp, max_disp);
  return f;
}

// Smooth image with 2-D structure everywhere; good terrain for window-based flow.
inline turbstab::Image smooth_image(int w, int h, double phase = 0.0) {
  turbstab::Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double a = std::sin(2.0 * M_PI * x / 23.0 + phase) * std::cos(2.0 * M_PI * y / 17.0);
      const double b = std::sin(2.0 * M_PI * (x + y) / 31.0 + 0.7);
      const double c = std::cos(2.0 * M_PI * x / 9.0) * std::cos(2.0 * M_PI * y / 11.0 - phase);
      img.at(x, y) = 0.5 + 0.2 * a + 0.15 * b + 0.1 * c;
    }
  }
  return img;
}

// Piecewise-constant scene with edges and a textured patch; serves as the
// ground truth for end-to-end runs.
inline turbstab::Image test_chart(int w, int h) {
  turbstab::Image img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double v = 0.35 + 0.3 * (static_cast<double>(x) / w);
      const double cx = x - 0.3 * w, cy = y - 0.32 * h;
      if (cx * cx + cy * cy < 0.018 * w * h) v = 0.9;
      const double dx = x - 0.72 * w, dy = y - 0.3 * h;
      if (dx * dx + dy * dy < 0.008 * w * h) v = 0.12;
      if (y > 0.55 * h && y < 0.63 * h && (x / 8) % 2 == 0) v = 0.8;
      if (y > 0.7 * h && x > 0.15 * w && x < 0.85 * w)
        v = 0.5 + 0.28 * std::sin(2.0 * M_PI * x / 12.0) * std::sin(2.0 * M_PI * y / 12.0);
      img.at(x, y) = v;
    }
  }
  return img;
}

}  // namespace turbstab_test
