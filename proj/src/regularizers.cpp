#include "turbstab/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace turbstab {

namespace {

constexpr int kGaussSeidelSweeps = 4;

double resolve_rho(double rho, double mu) { return rho > 0.0 ? rho : mu; }

// One Gauss-Seidel pass of (mu - rho*Lap)u = rhs with the Neumann Laplacian
// matching divergence(gradient(.)).
void gauss_seidel_sweep(Image& u, const Image& rhs, double mu, double rho) {
  const int w = u.width, h = u.height;
  std::size_t i = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x, ++i) {
      double s = 0.0;
      int deg = 0;
      if (x > 0) { s += u.data[i - 1]; ++deg; }
      if (x < w - 1) { s += u.data[i + 1]; ++deg; }
      if (y > 0) { s += u.data[i - w]; ++deg; }
      if (y < h - 1) { s += u.data[i + w]; ++deg; }
      u.data[i] = (rhs.data[i] + rho * s) / (mu + rho * deg);
    }
  }
}

// Mean squared difference of replicate-padded patches centered at a and b.
double patch_distance2(const Image& v, int ax, int ay, int bx, int by, int pr) {
  const int w = v.width, h = v.height;
  double s = 0.0;
  for (int dy = -pr; dy <= pr; ++dy) {
    const int ya = std::clamp(ay + dy, 0, h - 1);
    const int yb = std::clamp(by + dy, 0, h - 1);
    for (int dx = -pr; dx <= pr; ++dx) {
      const int xa = std::clamp(ax + dx, 0, w - 1);
      const int xb = std::clamp(bx + dx, 0, w - 1);
      const double d = v.at(xa, ya) - v.at(xb, yb);
      s += d * d;
    }
  }
  const int np = (2 * pr + 1) * (2 * pr + 1);
  return s / static_cast<double>(np);
}

}  // namespace

void RegularizerSpec::validate() const {
  if (tv.inner_iterations < 1 || nltv.inner_iterations < 1 || frame.inner_iterations < 1)
    throw std::invalid_argument("RegularizerSpec: iteration counts must be >= 1");
  if (tv.bregman_penalty < 0.0 || nltv.bregman_penalty < 0.0 || frame.bregman_penalty < 0.0)
    throw std::invalid_argument("RegularizerSpec: bregman_penalty must be positive (or 0 for mu)");
  if (nltv.patch_radius < 1 || nltv.search_radius < nltv.patch_radius)
    throw std::invalid_argument("RegularizerSpec: need search_radius >= patch_radius >= 1");
  if (!(nltv.similarity_scale > 0.0))
    throw std::invalid_argument("RegularizerSpec: similarity_scale must be > 0");
  if (nltv.neighbors_kept < 1)
    throw std::invalid_argument("RegularizerSpec: neighbors_kept must be >= 1");
  if (frame.levels < 1) throw std::invalid_argument("RegularizerSpec: frame levels must be >= 1");
}

double scalar_soft_threshold(double x, double t) {
  if (t <= 0.0) return x;
  const double m = std::fabs(x) - t;
  if (m <= 0.0) return 0.0;
  return x < 0.0 ? -m : m;
}

std::pair<double, double> vector_soft_threshold(double px, double py, double t) {
  if (t <= 0.0) return {px, py};
  const double s = std::hypot(px, py);
  if (s <= t) return {0.0, 0.0};
  const double f = (s - t) / s;
  return {f * px, f * py};
}

double tv_value(const Image& u) {
  const VectorField g = gradient(u);
  double s = 0.0;
  for (std::size_t i = 0; i < g.px.size(); ++i) s += std::hypot(g.px[i], g.py[i]);
  return s;
}

Image tv_prox(const Image& v, double mu, int inner_iterations, double rho) {
  if (!(mu > 0.0)) throw std::invalid_argument("tv_prox: mu must be > 0");
  if (inner_iterations < 1) throw std::invalid_argument("tv_prox: inner_iterations must be >= 1");
  rho = resolve_rho(rho, mu);
  const double threshold = 1.0 / rho;

  Image u = v;
  VectorField d = gradient(v);  // consistent split start: d = grad(u0)
  VectorField b(v.width, v.height);
  Image rhs(v.width, v.height);
  VectorField c(v.width, v.height);

  for (int it = 0; it < inner_iterations; ++it) {
    for (std::size_t i = 0; i < c.px.size(); ++i) {
      c.px[i] = d.px[i] - b.px[i];
      c.py[i] = d.py[i] - b.py[i];
    }
    const Image dv = divergence(c);
    for (std::size_t i = 0; i < rhs.data.size(); ++i) rhs.data[i] = mu * v.data[i] - rho * dv.data[i];
    for (int s = 0; s < kGaussSeidelSweeps; ++s) gauss_seidel_sweep(u, rhs, mu, rho);

    const VectorField g = gradient(u);
    for (std::size_t i = 0; i < g.px.size(); ++i) {
      const auto [sx, sy] = vector_soft_threshold(g.px[i] + b.px[i], g.py[i] + b.py[i], threshold);
      d.px[i] = sx;
      d.py[i] = sy;
      b.px[i] += g.px[i] - d.px[i];
      b.py[i] += g.py[i] - d.py[i];
    }
  }
  return u;
}

NlWeights compute_nl_weights(const Image& v, const NltvParams& params) {
  const int pr = params.patch_radius, sr = params.search_radius, m = params.neighbors_kept;
  const int w = v.width, h = v.height;
  if (std::min(w, h) <= 2 * (pr + sr))
    throw std::invalid_argument("compute_nl_weights: image too small for patch/search radii");
  const double inv_h2 = 1.0 / (params.similarity_scale * params.similarity_scale);
  const std::size_t npix = v.size();

  // Per-pixel best-m picks, then union symmetrization of the directed picks.
  std::vector<std::pair<int, int>> edges;  // (min pixel, max pixel)
  edges.reserve(npix * static_cast<std::size_t>(m));
  std::vector<std::pair<double, int>> best;
  best.reserve(m + 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      best.clear();
      for (int ny = std::max(y - sr, 0); ny <= std::min(y + sr, h - 1); ++ny) {
        for (int nx = std::max(x - sr, 0); nx <= std::min(x + sr, w - 1); ++nx) {
          if (nx == x && ny == y) continue;
          const double d2 = patch_distance2(v, x, y, nx, ny, pr);
          const std::pair<double, int> cand{d2, ny * w + nx};
          if (best.size() < static_cast<std::size_t>(m)) {
            best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
          } else if (cand < best.back()) {
            best.pop_back();
            best.insert(std::upper_bound(best.begin(), best.end(), cand), cand);
          }
        }
      }
      const int self = y * w + x;
      for (const auto& [d2, nbr] : best)
        edges.emplace_back(std::min(self, nbr), std::max(self, nbr));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  NlWeights g;
  g.width = w;
  g.height = h;
  g.row_start.assign(npix + 1, 0);
  for (const auto& [a, b] : edges) {
    ++g.row_start[a + 1];
    ++g.row_start[b + 1];
  }
  for (std::size_t i = 0; i < npix; ++i) g.row_start[i + 1] += g.row_start[i];
  g.neighbor.resize(2 * edges.size());
  g.weight.resize(2 * edges.size());
  std::vector<std::size_t> fill(g.row_start.begin(), g.row_start.end() - 1);
  for (const auto& [a, b] : edges) {
    const double wgt =
        std::exp(-patch_distance2(v, a % w, a / w, b % w, b / w, pr) * inv_h2);
    g.neighbor[fill[a]] = b;
    g.weight[fill[a]++] = wgt;
    g.neighbor[fill[b]] = a;
    g.weight[fill[b]++] = wgt;
  }
  // Each row is filled in ascending neighbor order: smaller endpoints arrive
  // first (edges sorted by min endpoint), then larger ones in sorted order.
  g.reverse.resize(g.neighbor.size());
  for (std::size_t z = 0; z < npix; ++z) {
    for (std::size_t e = g.row_start[z]; e < g.row_start[z + 1]; ++e) {
      const int nbr = g.neighbor[e];
      const auto lo = g.neighbor.begin() + static_cast<std::ptrdiff_t>(g.row_start[nbr]);
      const auto hi = g.neighbor.begin() + static_cast<std::ptrdiff_t>(g.row_start[nbr + 1]);
      const auto it = std::lower_bound(lo, hi, static_cast<int>(z));
      g.reverse[e] = static_cast<std::size_t>(it - g.neighbor.begin());
    }
  }
  return g;
}

double nltv_value(const Image& u, const NlWeights& weights) {
  if (!weights.same_shape(u)) throw std::invalid_argument("nltv_value: shape mismatch");
  double total = 0.0;
  for (std::size_t z = 0; z < u.size(); ++z) {
    double s2 = 0.0;
    for (std::size_t e = weights.row_start[z]; e < weights.row_start[z + 1]; ++e) {
      const double diff = u.data[weights.neighbor[e]] - u.data[z];
      s2 += weights.weight[e] * diff * diff;
    }
    total += std::sqrt(s2);
  }
  return total;
}

Image nltv_prox(const Image& v, const NlWeights& weights, double mu, int inner_iterations,
                double rho) {
  if (!(mu > 0.0)) throw std::invalid_argument("nltv_prox: mu must be > 0");
  if (inner_iterations < 1) throw std::invalid_argument("nltv_prox: inner_iterations must be >= 1");
  if (!weights.same_shape(v)) throw std::invalid_argument("nltv_prox: shape mismatch");
  rho = resolve_rho(rho, mu);
  const double threshold = 1.0 / rho;
  const std::size_t npix = v.size();
  const std::size_t ne = weights.edge_count();

  std::vector<double> sw(ne), wsum(npix, 0.0);
  for (std::size_t z = 0; z < npix; ++z) {
    for (std::size_t e = weights.row_start[z]; e < weights.row_start[z + 1]; ++e) {
      sw[e] = std::sqrt(weights.weight[e]);
      wsum[z] += weights.weight[e];
    }
  }
  auto nlgrad = [&](const Image& u, std::vector<double>& g) {
    for (std::size_t z = 0; z < npix; ++z)
      for (std::size_t e = weights.row_start[z]; e < weights.row_start[z + 1]; ++e)
        g[e] = sw[e] * (u.data[weights.neighbor[e]] - u.data[z]);
  };

  Image u = v;
  std::vector<double> d(ne), b(ne, 0.0), c(ne), g(ne);
  nlgrad(v, d);  // consistent split start

  for (int it = 0; it < inner_iterations; ++it) {
    for (std::size_t e = 0; e < ne; ++e) c[e] = d[e] - b[e];
    for (int s = 0; s < kGaussSeidelSweeps; ++s) {
      for (std::size_t z = 0; z < npix; ++z) {
        double acc = 0.0;
        for (std::size_t e = weights.row_start[z]; e < weights.row_start[z + 1]; ++e)
          acc += 2.0 * weights.weight[e] * u.data[weights.neighbor[e]] -
                 sw[e] * (c[e] - c[weights.reverse[e]]);
        u.data[z] = (mu * v.data[z] + rho * acc) / (mu + 2.0 * rho * wsum[z]);
      }
    }
    nlgrad(u, g);
    for (std::size_t z = 0; z < npix; ++z) {
      double s2 = 0.0;
      for (std::size_t e = weights.row_start[z]; e < weights.row_start[z + 1]; ++e) {
        const double q = g[e] + b[e];
        s2 += q * q;
      }
      const double s = std::sqrt(s2);
      const double f = s <= threshold ? 0.0 : (s - threshold) / s;
      for (std::size_t e = weights.row_start[z]; e < weights.row_start[z + 1]; ++e) {
        d[e] = f * (g[e] + b[e]);
        b[e] += g[e] - d[e];
      }
    }
  }
  return u;
}

double prox_objective(const RegularizerSpec& spec, const Image& u, const Image& v, double mu,
                      const NlWeights* weights) {
  double j = 0.0;
  switch (spec.kind) {
    case RegKind::tv:
      j = tv_value(u);
      break;
    case RegKind::nltv: {
      NlWeights local;
      if (weights == nullptr) {
        local = compute_nl_weights(v, spec.nltv);
        weights = &local;
      }
      j = nltv_value(u, *weights);
      break;
    }
    case RegKind::frame:
      j = frame_l1_value(u, spec.frame.levels);
      break;
  }
  double fid = 0.0;
  for (std::size_t i = 0; i < u.data.size(); ++i) {
    const double d = u.data[i] - v.data[i];
    fid += d * d;
  }
  return j + 0.5 * mu * fid;
}

Image prox(const RegularizerSpec& spec, const Image& v, double mu) {
  spec.validate();
  if (!(mu > 0.0)) throw std::invalid_argument("prox: mu must be > 0");

  Image u;
  NlWeights weights;
  const NlWeights* wptr = nullptr;
  switch (spec.kind) {
    case RegKind::tv:
      u = tv_prox(v, mu, spec.tv.inner_iterations, spec.tv.bregman_penalty);
      break;
    case RegKind::nltv:
      weights = compute_nl_weights(v, spec.nltv);
      wptr = &weights;
      u = nltv_prox(v, weights, mu, spec.nltv.inner_iterations, spec.nltv.bregman_penalty);
      break;
    case RegKind::frame:
      u = frame_prox(v, mu, spec.frame.levels, spec.frame.inner_iterations,
                     spec.frame.bregman_penalty);
      break;
  }
  // The contract forbids increasing J(u) + (mu/2)||u - v||^2 over staying at v.
  if (prox_objective(spec, u, v, mu, wptr) > prox_objective(spec, v, v, mu, wptr)) return v;
  return u;
}

}  // namespace turbstab
