#include "turbstab/optical_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace turbstab {

namespace {

// Summed-area table with a one-cell zero border; rect sums are O(1).
class Sat {
 public:
  Sat(const std::vector<double>& a, int w, int h) : w_(w), s_((w + 1) * (h + 1), 0.0) {
    for (int y = 0; y < h; ++y) {
      double row = 0.0;
      for (int x = 0; x < w; ++x) {
        row += a[static_cast<std::size_t>(y) * w + x];
        s_[idx(x + 1, y + 1)] = row + s_[idx(x + 1, y)];
      }
    }
  }
  double rect(int x1, int y1, int x2, int y2) const {
    return s_[idx(x2 + 1, y2 + 1)] - s_[idx(x1, y2 + 1)] - s_[idx(x2 + 1, y1)] + s_[idx(x1, y1)];
  }

 private:
  std::size_t idx(int x, int y) const { return static_cast<std::size_t>(y) * (w_ + 1) + x; }
  int w_;
  std::vector<double> s_;
};

// Central differences, replicate boundary.
void central_gradients(const Image& u, Image& gx, Image& gy) {
  const int w = u.width, h = u.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double xr = u.at(std::min(x + 1, w - 1), y);
      const double xl = u.at(std::max(x - 1, 0), y);
      const double yd = u.at(x, std::min(y + 1, h - 1));
      const double yu = u.at(x, std::max(y - 1, 0));
      gx.at(x, y) = 0.5 * (xr - xl);
      gy.at(x, y) = 0.5 * (yd - yu);
    }
  }
}

int max_levels_for(int w, int h) {
  int levels = 1;
  int m = std::min(w, h);
  while (m / 2 >= 8) {
    ++levels;
    m /= 2;
  }
  return levels;
}

FlowField upsample_flow(const FlowField& coarse, int w, int h) {
  Image cdx(coarse.width, coarse.height, 0.0), cdy(coarse.width, coarse.height, 0.0);
  cdx.data = coarse.dx;
  cdy.data = coarse.dy;
  FlowField fine(w, h);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      const double sx = (x + 0.5) * 0.5 - 0.5;
      const double sy = (y + 0.5) * 0.5 - 0.5;
      fine.dx[i] = 2.0 * bilinear_sample(cdx, sx, sy);
      fine.dy[i] = 2.0 * bilinear_sample(cdy, sx, sy);
    }
  }
  return fine;
}

void lk_refine(const Image& ref, const Image& target, const FlowParams& p, FlowField& flow) {
  const int w = ref.width, h = ref.height;
  const std::size_t n = ref.size();
  Image gx(w, h), gy(w, h);
  central_gradients(ref, gx, gy);

  std::vector<double> a11(n), a12(n), a22(n), b1(n), b2(n);
  FlowField next(w, h);

  for (int iter = 0; iter < p.iterations_per_level; ++iter) {
    const Image warped = warp_apply(ref, flow);
    const Image gxw = warp_apply(gx, flow);
    const Image gyw = warp_apply(gy, flow);
    for (std::size_t i = 0; i < n; ++i) {
      const double it = target.data[i] - warped.data[i];
      a11[i] = gxw.data[i] * gxw.data[i];
      a12[i] = gxw.data[i] * gyw.data[i];
      a22[i] = gyw.data[i] * gyw.data[i];
      b1[i] = gxw.data[i] * it;
      b2[i] = gyw.data[i] * it;
    }
    const Sat s11(a11, w, h), s12(a12, w, h), s22(a22, w, h), sb1(b1, w, h), sb2(b2, w, h);

    std::size_t i = 0;
    for (int y = 0; y < h; ++y) {
      const int y1 = std::max(y - p.window_radius, 0);
      const int y2 = std::min(y + p.window_radius, h - 1);
      for (int x = 0; x < w; ++x, ++i) {
        const int x1 = std::max(x - p.window_radius, 0);
        const int x2 = std::min(x + p.window_radius, w - 1);
        const double count = static_cast<double>((x2 - x1 + 1) * (y2 - y1 + 1));
        const double m11 = s11.rect(x1, y1, x2, y2);
        const double m12 = s12.rect(x1, y1, x2, y2);
        const double m22 = s22.rect(x1, y1, x2, y2);
        const double tr = m11 + m22;
        const double det = m11 * m22 - m12 * m12;
        const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
        const double min_eig = 0.5 * (tr - disc) / count;
        double ux = 0.0, uy = 0.0;
        if (min_eig >= p.min_eigen_threshold && det > 0.0) {
          const double r1 = sb1.rect(x1, y1, x2, y2);
          const double r2 = sb2.rect(x1, y1, x2, y2);
          ux = (m22 * r1 - m12 * r2) / det;
          uy = (m11 * r2 - m12 * r1) / det;
        }
        next.dx[i] = flow.dx[i] + ux;
        next.dy[i] = flow.dy[i] + uy;
      }
    }
    std::swap(flow.dx, next.dx);
    std::swap(flow.dy, next.dy);
  }
}

}  // namespace

void FlowParams::validate() const {
  if (window_radius < 1) throw std::invalid_argument("FlowParams: window_radius must be >= 1");
  if (pyramid_levels < 1) throw std::invalid_argument("FlowParams: pyramid_levels must be >= 1");
  if (iterations_per_level < 1)
    throw std::invalid_argument("FlowParams: iterations_per_level must be >= 1");
  if (!(min_eigen_threshold >= 0.0))
    throw std::invalid_argument("FlowParams: min_eigen_threshold must be >= 0");
}

Image downsample2(const Image& image) {
  if (image.width < 2 || image.height < 2)
    throw std::invalid_argument("downsample2: image must be at least 2x2");
  const int w = image.width / 2, h = image.height / 2;
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      out.at(x, y) = 0.25 * (image.at(2 * x, 2 * y) + image.at(2 * x + 1, 2 * y) +
                             image.at(2 * x, 2 * y + 1) + image.at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

FlowField estimate_flow(const Image& reference, const Image& target, const FlowParams& params) {
  params.validate();
  if (!reference.same_shape(target)) throw std::invalid_argument("estimate_flow: dimension mismatch");
  if (reference.width < 16 || reference.height < 16)
    throw std::invalid_argument("estimate_flow: images must be at least 16x16");

  const int levels = std::min(params.pyramid_levels, max_levels_for(reference.width, reference.height));
  std::vector<Image> ref_pyr{reference}, tgt_pyr{target};
  for (int l = 1; l < levels; ++l) {
    ref_pyr.push_back(downsample2(ref_pyr.back()));
    tgt_pyr.push_back(downsample2(tgt_pyr.back()));
  }

  FlowField flow(ref_pyr.back().width, ref_pyr.back().height);
  for (int l = levels - 1; l >= 0; --l) {
    if (l < levels - 1) flow = upsample_flow(flow, ref_pyr[l].width, ref_pyr[l].height);
    lk_refine(ref_pyr[l], tgt_pyr[l], params, flow);
  }
  return flow;
}

}  // namespace turbstab
