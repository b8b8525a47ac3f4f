#include "turbstab/image.hpp"

#include <algorithm>

namespace turbstab {

namespace {

struct BilinearTap {
  int x0, x1, y0, y1;
  double w00, w10, w01, w11;
};

// Shared by warp_apply and warp_adjoint so the scatter uses the exact
// gather weights and the operators stay transposes of each other.
inline BilinearTap bilinear_tap(const Image& img, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(cx);
  const int y0 = static_cast<int>(cy);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  return {x0, x1, y0, y1, (1.0 - fx) * (1.0 - fy), fx * (1.0 - fy), (1.0 - fx) * fy, fx * fy};
}

}  // namespace

double bilinear_sample(const Image& image, double x, double y) {
  const BilinearTap t = bilinear_tap(image, x, y);
  return t.w00 * image.at(t.x0, t.y0) + t.w10 * image.at(t.x1, t.y0) +
         t.w01 * image.at(t.x0, t.y1) + t.w11 * image.at(t.x1, t.y1);
}

Image warp_apply(const Image& u, const FlowField& flow) {
  if (!flow.same_shape(u)) throw std::invalid_argument("warp_apply: dimension mismatch");
  Image out(u.width, u.height);
  std::size_t i = 0;
  for (int y = 0; y < u.height; ++y) {
    for (int x = 0; x < u.width; ++x, ++i) {
      out.data[i] = bilinear_sample(u, x + flow.dx[i], y + flow.dy[i]);
    }
  }
  return out;
}

Image warp_adjoint(const Image& r, const FlowField& flow) {
  if (!flow.same_shape(r)) throw std::invalid_argument("warp_adjoint: dimension mismatch");
  Image out(r.width, r.height);
  std::size_t i = 0;
  for (int y = 0; y < r.height; ++y) {
    for (int x = 0; x < r.width; ++x, ++i) {
      const BilinearTap t = bilinear_tap(r, x + flow.dx[i], y + flow.dy[i]);
      const double v = r.data[i];
      out.at(t.x0, t.y0) += t.w00 * v;
      out.at(t.x1, t.y0) += t.w10 * v;
      out.at(t.x0, t.y1) += t.w01 * v;
      out.at(t.x1, t.y1) += t.w11 * v;
    }
  }
  return out;
}

VectorField gradient(const Image& u) {
  VectorField g(u.width, u.height);
  std::size_t i = 0;
  for (int y = 0; y < u.height; ++y) {
    for (int x = 0; x < u.width; ++x, ++i) {
      g.px[i] = (x < u.width - 1) ? u.data[i + 1] - u.data[i] : 0.0;
      g.py[i] = (y < u.height - 1) ? u.data[i + u.width] - u.data[i] : 0.0;
    }
  }
  return g;
}

Image divergence(const VectorField& p) {
  const int w = p.width, h = p.height;
  Image out(w, h);
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      double d = 0.0;
      if (w > 1) {
        if (x == 0)
          d += p.px[i];
        else if (x == w - 1)
          d += -p.px[i - 1];
        else
          d += p.px[i] - p.px[i - 1];
      }
      if (h > 1) {
        if (y == 0)
          d += p.py[i];
        else if (y == h - 1)
          d += -p.py[i - w];
        else
          d += p.py[i] - p.py[i - w];
      }
      out.data[i] = d;
    }
  }
  return out;
}

double dot(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw std::invalid_argument("dot: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) s += a.data[i] * b.data[i];
  return s;
}

double norm2(const Image& a) { return std::sqrt(dot(a, a)); }

bool all_finite(const Image& a) {
  for (double v : a.data)
    if (!std::isfinite(v)) return false;
  return true;
}

bool all_finite(const FlowField& f) {
  for (double v : f.dx)
    if (!std::isfinite(v)) return false;
  for (double v : f.dy)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace turbstab
