#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "turbstab/image.hpp"

namespace turbstab {

enum class RegKind { tv, nltv, frame };

struct TvParams {
  int inner_iterations = 10;
  double bregman_penalty = 0.0;  // 0 -> use mu
};

struct NltvParams {
  int patch_radius = 2;
  int search_radius = 7;
  double similarity_scale = 0.1;  // h in w(x,y) = exp(-d^2/h^2)
  int neighbors_kept = 10;
  int inner_iterations = 5;
  double bregman_penalty = 0.0;  // 0 -> use mu
};

struct FrameParams {
  int levels = 2;
  int inner_iterations = 10;
  double bregman_penalty = 0.0;  // 0 -> use mu
};

struct RegularizerSpec {
  RegKind kind = RegKind::tv;
  TvParams tv;
  NltvParams nltv;
  FrameParams frame;

  void validate() const;
};

/// Symmetric sparse patch-similarity graph; weight(x,y) == weight(y,x) exactly.
/// CSR layout; reverse[e] is the index of the opposite-direction edge.
struct NlWeights {
  int width = 0;
  int height = 0;
  std::vector<std::size_t> row_start;  // size width*height + 1
  std::vector<int> neighbor;           // sorted per row
  std::vector<double> weight;
  std::vector<std::size_t> reverse;

  std::size_t edge_count() const { return neighbor.size(); }
  bool same_shape(const Image& img) const { return width == img.width && height == img.height; }
};

/// Undecimated piecewise-linear B-spline framelet coefficients.
/// Each level carries 8 detail subbands (and cascades its lowpass to the next);
/// the deepest lowpass is stored once. With this layout W^T W = I holds exactly.
struct FrameCoefficients {
  int width = 0;
  int height = 0;
  int levels = 0;
  Image lowpass;
  std::vector<std::array<Image, 8>> detail;  // [level][band], level 0 finest
};

double scalar_soft_threshold(double x, double t);
std::pair<double, double> vector_soft_threshold(double px, double py, double t);

/// ROF prox via split Bregman with splitting d = grad(u).
Image tv_prox(const Image& v, double mu, int inner_iterations = 10, double rho = 0.0);

NlWeights compute_nl_weights(const Image& v, const NltvParams& params);

/// Nonlocal TV prox via split Bregman on the weighted nonlocal gradient;
/// weights are held fixed during the solve.
Image nltv_prox(const Image& v, const NlWeights& weights, double mu, int inner_iterations = 5,
                double rho = 0.0);

FrameCoefficients frame_analysis(const Image& u, int levels);
Image frame_synthesis(const FrameCoefficients& c);

/// L1-L2 prox in the framelet domain; closed-form u-update since W^T W = I.
Image frame_prox(const Image& v, double mu, int levels = 2, int inner_iterations = 10,
                 double rho = 0.0);

/// argmin_u J(u) + (mu/2) ||u - v||^2, dispatching on spec.kind.
/// Guaranteed not to increase the objective relative to u = v.
Image prox(const RegularizerSpec& spec, const Image& v, double mu);

// Regularizer values, used for objective traces and descent checks.
double tv_value(const Image& u);
double nltv_value(const Image& u, const NlWeights& weights);
double frame_l1_value(const Image& u, int levels);

/// J(u) + (mu/2) ||u - v||^2 for the given kind (NLTV weights from `weights`).
double prox_objective(const RegularizerSpec& spec, const Image& u, const Image& v, double mu,
                      const NlWeights* weights = nullptr);

}  // namespace turbstab
