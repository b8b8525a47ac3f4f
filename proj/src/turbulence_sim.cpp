#include "turbstab/turbulence_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace turbstab {

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable convolution with replicate boundary over a raw row-major array.
void blur_array(std::vector<double>& a, int w, int h, const std::vector<double>& kernel) {
  const int r = static_cast<int>(kernel.size() / 2);
  std::vector<double> tmp(a.size());
  for (int y = 0; y < h; ++y) {
    const double* row = a.data() + static_cast<std::size_t>(y) * w;
    double* out = tmp.data() + static_cast<std::size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int t = -r; t <= r; ++t) s += kernel[t + r] * row[std::clamp(x + t, 0, w - 1)];
      out[x] = s;
    }
  }
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) {
      double s = 0.0;
      for (int t = -r; t <= r; ++t)
        s += kernel[t + r] * tmp[static_cast<std::size_t>(std::clamp(y + t, 0, h - 1)) * w + x];
      a[static_cast<std::size_t>(y) * w + x] = s;
    }
  }
}

void subtract_mean(std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m += v;
  m /= static_cast<double>(a.size());
  for (double& v : a) v -= m;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

void SimConfig::validate() const {
  if (frames < 1) throw std::invalid_argument("SimConfig: frames must be >= 1");
  if (!(deform_amplitude >= 0.0) || !std::isfinite(deform_amplitude))
    throw std::invalid_argument("SimConfig: deform_amplitude must be finite and >= 0");
  if (!(correlation_length > 0.0) || !std::isfinite(correlation_length))
    throw std::invalid_argument("SimConfig: correlation_length must be finite and > 0");
  if (!(blur_sigma >= 0.0) || !std::isfinite(blur_sigma))
    throw std::invalid_argument("SimConfig: blur_sigma must be finite and >= 0");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma))
    throw std::invalid_argument("SimConfig: noise_sigma must be finite and >= 0");
}

FlowField gen_deformation(int width, int height, double amplitude, double correlation_length,
                          std::mt19937_64& rng) {
  if (width < 8 || height < 8) throw std::invalid_argument("gen_deformation: dims must be >= 8");
  if (!(correlation_length > 0.0))
    throw std::invalid_argument("gen_deformation: correlation_length must be > 0");
  FlowField field(width, height);
  if (amplitude == 0.0) return field;

  std::normal_distribution<double> gauss(0.0, 1.0);
  for (double& v : field.dx) v = gauss(rng);
  for (double& v : field.dy) v = gauss(rng);

  const std::vector<double> kernel = gaussian_kernel(correlation_length);
  blur_array(field.dx, width, height, kernel);
  blur_array(field.dy, width, height, kernel);
  subtract_mean(field.dx);
  subtract_mean(field.dy);

  double ms = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i)
    ms += field.dx[i] * field.dx[i] + field.dy[i] * field.dy[i];
  ms /= static_cast<double>(field.size());
  const double rms = std::sqrt(ms);
  if (rms == 0.0) return field;  // degenerate draw, keep the zero field
  const double scale = amplitude / rms;
  for (double& v : field.dx) v *= scale;
  for (double& v : field.dy) v *= scale;
  return field;
}

Image gaussian_blur(const Image& image, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("gaussian_blur: sigma must be >= 0");
  Image out = image;
  if (sigma == 0.0) return out;
  blur_array(out.data, out.width, out.height, gaussian_kernel(sigma));
  return out;
}

DegradeResult degrade(const Image& truth, const SimConfig& cfg) {
  cfg.validate();
  DegradeResult result;
  result.frames.reserve(cfg.frames);
  result.fields.reserve(cfg.frames);

  const Image blurred = gaussian_blur(truth, cfg.blur_sigma);
  for (int i = 0; i < cfg.frames; ++i) {
    std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(i) + 1)));
    FlowField field = gen_deformation(truth.width, truth.height, cfg.deform_amplitude,
                                      cfg.correlation_length, rng);
    Image frame = warp_apply(blurred, field);
    if (cfg.noise_sigma > 0.0) {
      std::normal_distribution<double> noise(0.0, cfg.noise_sigma);
      for (double& v : frame.data) v += noise(rng);
    }
    for (double& v : frame.data) v = std::clamp(v, 0.0, 1.0);
    result.frames.push_back(std::move(frame));
    result.fields.push_back(std::move(field));
  }
  return result;
}

}  // namespace turbstab
