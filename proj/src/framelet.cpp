#include <array>
#include <cmath>
#include <stdexcept>

#include "turbstab/regularizers.hpp"

namespace turbstab {

namespace {

// Piecewise-linear B-spline framelet masks; sum_k |h_k(w)|^2 = 1, so the
// undecimated transform with periodic indexing is a unit tight frame.
constexpr double kS24 = 0.35355339059327373;  // sqrt(2)/4
constexpr std::array<std::array<double, 3>, 3> kMasks = {{
    {{0.25, 0.5, 0.25}},
    {{kS24, 0.0, -kS24}},
    {{-0.25, 0.5, -0.25}},
}};

inline int wrap(int i, int n) {
  i %= n;
  return i < 0 ? i + n : i;
}

// Correlation with taps at offsets {-s, 0, +s}; `adjoint` transposes it.
Image filter_x(const Image& src, const std::array<double, 3>& m, int s, bool adjoint) {
  const int w = src.width, h = src.height;
  const int off = adjoint ? -s : s;
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const double* row = src.data.data() + static_cast<std::size_t>(y) * w;
    double* orow = out.data.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x)
      orow[x] = m[0] * row[wrap(x - off, w)] + m[1] * row[x] + m[2] * row[wrap(x + off, w)];
  }
  return out;
}

Image filter_y(const Image& src, const std::array<double, 3>& m, int s, bool adjoint) {
  const int w = src.width, h = src.height;
  const int off = adjoint ? -s : s;
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const double* up = src.data.data() + static_cast<std::size_t>(wrap(y - off, h)) * w;
    const double* mid = src.data.data() + static_cast<std::size_t>(y) * w;
    const double* dn = src.data.data() + static_cast<std::size_t>(wrap(y + off, h)) * w;
    double* orow = out.data.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) orow[x] = m[0] * up[x] + m[1] * mid[x] + m[2] * dn[x];
  }
  return out;
}

void check_levels(const Image& u, int levels) {
  if (levels < 1) throw std::invalid_argument("framelet: levels must be >= 1");
  if (std::min(u.width, u.height) < (1 << levels))
    throw std::invalid_argument("framelet: image too small for requested levels");
}

FrameCoefficients zeros_like(const FrameCoefficients& c) {
  FrameCoefficients z;
  z.width = c.width;
  z.height = c.height;
  z.levels = c.levels;
  z.lowpass = Image(c.width, c.height);
  z.detail.resize(c.levels);
  for (int l = 0; l < c.levels; ++l)
    for (int k = 0; k < 8; ++k) z.detail[l][k] = Image(c.width, c.height);
  return z;
}

}  // namespace

FrameCoefficients frame_analysis(const Image& u, int levels) {
  check_levels(u, levels);
  FrameCoefficients c;
  c.width = u.width;
  c.height = u.height;
  c.levels = levels;
  c.detail.resize(levels);

  Image ll = u;
  for (int l = 0; l < levels; ++l) {
    const int s = 1 << l;
    std::array<Image, 3> rows;
    for (int j = 0; j < 3; ++j) rows[j] = filter_x(ll, kMasks[j], s, false);
    Image next;
    for (int iy = 0; iy < 3; ++iy) {
      for (int ix = 0; ix < 3; ++ix) {
        Image band = filter_y(rows[ix], kMasks[iy], s, false);
        if (iy == 0 && ix == 0)
          next = std::move(band);
        else
          c.detail[l][iy * 3 + ix - 1] = std::move(band);
      }
    }
    ll = std::move(next);
  }
  c.lowpass = std::move(ll);
  return c;
}

Image frame_synthesis(const FrameCoefficients& c) {
  if (c.levels < 1 || c.detail.size() != static_cast<std::size_t>(c.levels))
    throw std::invalid_argument("frame_synthesis: malformed coefficient layout");
  const int w = c.width, h = c.height;
  auto check = [&](const Image& img) {
    if (img.width != w || img.height != h)
      throw std::invalid_argument("frame_synthesis: malformed coefficient layout");
  };
  check(c.lowpass);
  for (const auto& level : c.detail)
    for (const auto& band : level) check(band);

  Image ll = c.lowpass;
  for (int l = c.levels - 1; l >= 0; --l) {
    const int s = 1 << l;
    Image acc(w, h);
    for (int iy = 0; iy < 3; ++iy) {
      for (int ix = 0; ix < 3; ++ix) {
        const Image& band = (iy == 0 && ix == 0) ? ll : c.detail[l][iy * 3 + ix - 1];
        Image t = filter_y(band, kMasks[iy], s, true);
        t = filter_x(t, kMasks[ix], s, true);
        for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += t.data[i];
      }
    }
    ll = std::move(acc);
  }
  return ll;
}

double frame_l1_value(const Image& u, int levels) {
  const FrameCoefficients c = frame_analysis(u, levels);
  double s = 0.0;
  for (const auto& level : c.detail)
    for (const auto& band : level)
      for (double v : band.data) s += std::fabs(v);
  return s;
}

Image frame_prox(const Image& v, double mu, int levels, int inner_iterations, double rho) {
  if (!(mu > 0.0)) throw std::invalid_argument("frame_prox: mu must be > 0");
  if (inner_iterations < 1) throw std::invalid_argument("frame_prox: inner_iterations must be >= 1");
  check_levels(v, levels);
  rho = rho > 0.0 ? rho : mu;
  const double threshold = 1.0 / rho;

  Image u = v;
  FrameCoefficients d = frame_analysis(v, levels);  // consistent split start
  FrameCoefficients b = zeros_like(d);
  FrameCoefficients tmp = zeros_like(d);

  for (int it = 0; it < inner_iterations; ++it) {
    // u = (mu*v + rho*W^T(d - b)) / (mu + rho); W^T W = I makes this exact.
    for (std::size_t i = 0; i < tmp.lowpass.data.size(); ++i)
      tmp.lowpass.data[i] = d.lowpass.data[i] - b.lowpass.data[i];
    for (int l = 0; l < levels; ++l)
      for (int k = 0; k < 8; ++k)
        for (std::size_t i = 0; i < tmp.detail[l][k].data.size(); ++i)
          tmp.detail[l][k].data[i] = d.detail[l][k].data[i] - b.detail[l][k].data[i];
    const Image syn = frame_synthesis(tmp);
    for (std::size_t i = 0; i < u.data.size(); ++i)
      u.data[i] = (mu * v.data[i] + rho * syn.data[i]) / (mu + rho);

    const FrameCoefficients c = frame_analysis(u, levels);
    // Detail bands shrink; the lowpass passes through untouched.
    for (int l = 0; l < levels; ++l) {
      for (int k = 0; k < 8; ++k) {
        for (std::size_t i = 0; i < c.detail[l][k].data.size(); ++i) {
          const double q = c.detail[l][k].data[i] + b.detail[l][k].data[i];
          d.detail[l][k].data[i] = scalar_soft_threshold(q, threshold);
          b.detail[l][k].data[i] = q - d.detail[l][k].data[i];
        }
      }
    }
    for (std::size_t i = 0; i < c.lowpass.data.size(); ++i) {
      const double q = c.lowpass.data[i] + b.lowpass.data[i];
      d.lowpass.data[i] = q;
      b.lowpass.data[i] = 0.0;
    }
  }
  return u;
}

}  // namespace turbstab
