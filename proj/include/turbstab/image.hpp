#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbstab {

/// 2-D grid of scalar intensities, row-major, nominal range [0,1].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;  // data[y * width + x]

  Image() = default;
  Image(int w, int h, double fill = 0.0) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Image: dimensions must be positive");
    data.assign(static_cast<std::size_t>(w) * h, fill);
  }
  Image(int w, int h, std::vector<double> values) : width(w), height(h), data(std::move(values)) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Image: dimensions must be positive");
    if (data.size() != static_cast<std::size_t>(w) * h)
      throw std::invalid_argument("Image: data length does not match dimensions");
  }

  std::size_t size() const { return data.size(); }
  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  bool same_shape(const Image& other) const { return width == other.width && height == other.height; }
};

/// Per-pixel 2-D displacement grid (pixels).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> dx;
  std::vector<double> dy;

  FlowField() = default;
  FlowField(int w, int h, double fill_x = 0.0, double fill_y = 0.0) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("FlowField: dimensions must be positive");
    dx.assign(static_cast<std::size_t>(w) * h, fill_x);
    dy.assign(static_cast<std::size_t>(w) * h, fill_y);
  }

  std::size_t size() const { return dx.size(); }
  bool same_shape(const Image& img) const { return width == img.width && height == img.height; }
};

/// Per-pixel gradient components (forward differences).
struct VectorField {
  int width = 0;
  int height = 0;
  std::vector<double> px;
  std::vector<double> py;

  VectorField() = default;
  VectorField(int w, int h) : width(w), height(h) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("VectorField: dimensions must be positive");
    px.assign(static_cast<std::size_t>(w) * h, 0.0);
    py.assign(static_cast<std::size_t>(w) * h, 0.0);
  }
};

using FrameSequence = std::vector<Image>;

/// Bilinear interpolation with clamp-to-edge; coordinates may fall outside the grid.
double bilinear_sample(const Image& image, double x, double y);

/// (Phi u)(x) = u(x + phi(x)) by bilinear sampling.
Image warp_apply(const Image& u, const FlowField& flow);

/// Exact transpose of warp_apply: scatters r with the same bilinear weights.
Image warp_adjoint(const Image& r, const FlowField& flow);

/// Forward differences, Neumann boundary (last row/column difference = 0).
VectorField gradient(const Image& u);

/// Negative adjoint of gradient: <gradient(u), p> == <u, -divergence(p)> exactly.
Image divergence(const VectorField& p);

double dot(const Image& a, const Image& b);
double norm2(const Image& a);
bool all_finite(const Image& a);
bool all_finite(const FlowField& f);

}  // namespace turbstab
