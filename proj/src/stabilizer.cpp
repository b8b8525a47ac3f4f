#include "turbstab/stabilizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "turbstab/parallel.hpp"

namespace turbstab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_sequence(const FrameSequence& frames) {
  if (frames.empty()) throw std::invalid_argument("stabilizer: empty frame sequence");
  for (const Image& f : frames)
    if (!f.same_shape(frames.front()))
      throw std::invalid_argument("stabilizer: frames must share one shape");
}

// Normalized fidelities against two targets sharing the warps of u.
struct DualFidelity {
  double vs_a = 0.0;
  double vs_b = 0.0;
};

DualFidelity dual_fidelity(const Image& u, const FrameSequence& a, const FrameSequence& b,
                           const std::vector<FlowField>& flows, int threads) {
  const int n = static_cast<int>(a.size());
  std::vector<double> pa(n, 0.0), pb(n, 0.0);
  parallel_for(n, threads, [&](int i) {
    const Image warped = warp_apply(u, flows[i]);
    double sa = 0.0, sb = 0.0;
    for (std::size_t k = 0; k < warped.data.size(); ++k) {
      const double da = warped.data[k] - a[i].data[k];
      const double db = warped.data[k] - b[i].data[k];
      sa += da * da;
      sb += db * db;
    }
    pa[i] = sa;
    pb[i] = sb;
  });
  DualFidelity out;
  for (int i = 0; i < n; ++i) {
    out.vs_a += pa[i];
    out.vs_b += pb[i];
  }
  const double norm = static_cast<double>(n) * static_cast<double>(u.size());
  out.vs_a /= norm;
  out.vs_b /= norm;
  return out;
}

double fidelity_tilde(const Image& u, const FrameSequence& tilde,
                      const std::vector<FlowField>& flows, int threads) {
  return dual_fidelity(u, tilde, tilde, flows, threads).vs_a;
}

void require_finite(const Image& u, const char* phase) {
  if (!all_finite(u))
    throw std::runtime_error(std::string("stabilize: non-finite values after ") + phase);
}

// Shared implementation; `trace`, `frames` and `outer` are only used when
// stabilize wants the per-inner log.
Image run_inner_loop(const Image& u0, const FrameSequence& tilde,
                     const std::vector<FlowField>& flows, const StabilizerConfig& cfg,
                     const FrameSequence* frames, int outer, std::vector<TraceRow>* trace,
                     PhaseTimes* times) {
  const int n = static_cast<int>(tilde.size());
  double delta = cfg.resolve_delta(n);
  Image u = u0;
  double fid_prev;
  if (frames != nullptr && trace != nullptr) {
    const DualFidelity start = dual_fidelity(u, *frames, tilde, flows, cfg.threads);
    trace->push_back({outer, 0, start.vs_a, start.vs_b});
    fid_prev = start.vs_b;
  } else {
    fid_prev = fidelity_tilde(u, tilde, flows, cfg.threads);
  }

  for (int k = 1; k <= cfg.inner_iterations; ++k) {
    const auto t_grad = Clock::now();
    Image v = gradient_step(u, tilde, flows, delta, cfg.threads);
    // The step bound delta <= 0.5/N makes this a descent step; if rounding or
    // an ill-conditioned flow ever breaks that, halve delta and retry.
    int guard = 0;
    while (fidelity_tilde(v, tilde, flows, cfg.threads) > fid_prev + 1e-12 && guard < 20) {
      delta *= 0.5;
      v = gradient_step(u, tilde, flows, delta, cfg.threads);
      ++guard;
    }
    if (times) times->gradient_seconds += seconds_since(t_grad);

    const auto t_prox = Clock::now();
    Image trial = prox(cfg.regularizer, v, cfg.lambda / delta);
    if (times) times->prox_seconds += seconds_since(t_prox);
    require_finite(trial, "prox");

    const DualFidelity both =
        dual_fidelity(trial, frames != nullptr ? *frames : tilde, tilde, flows, cfg.threads);
    // A step that no longer decreases the guard quantity means the loop has
    // converged to the solver's noise floor; keep the last accepted iterate.
    if (both.vs_b > fid_prev) break;
    u = std::move(trial);
    if (trace != nullptr) trace->push_back({outer, k, both.vs_a, both.vs_b});
    if (fid_prev - both.vs_b <= 1e-4 * std::max(fid_prev, std::numeric_limits<double>::min()))
      break;
    fid_prev = both.vs_b;
  }
  return u;
}

}  // namespace

void StabilizerConfig::validate(int frame_count) const {
  if (frame_count < 1) throw std::invalid_argument("StabilizerConfig: need at least one frame");
  if (delta < 0.0 || !std::isfinite(delta))
    throw std::invalid_argument("StabilizerConfig: delta must be finite and >= 0");
  if (delta > 0.0 && delta > 1.0 / frame_count)
    throw std::invalid_argument("StabilizerConfig: delta must be <= 1/N");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("StabilizerConfig: lambda must be finite and > 0");
  if (outer_iterations < 1 || inner_iterations < 1)
    throw std::invalid_argument("StabilizerConfig: iteration counts must be >= 1");
  if (!(fidelity_tolerance > 0.0))
    throw std::invalid_argument("StabilizerConfig: fidelity_tolerance must be > 0");
  if (threads < 1) throw std::invalid_argument("StabilizerConfig: threads must be >= 1");
  flow.validate();
  regularizer.validate();
}

double StabilizerConfig::resolve_delta(int frame_count) const {
  return delta > 0.0 ? delta : 0.5 / frame_count;
}

Image temporal_average(const FrameSequence& frames) {
  check_sequence(frames);
  Image mean(frames.front().width, frames.front().height);
  for (const Image& f : frames)
    for (std::size_t i = 0; i < mean.data.size(); ++i) mean.data[i] += f.data[i];
  const double inv = 1.0 / static_cast<double>(frames.size());
  for (double& v : mean.data) v *= inv;
  return mean;
}

Image gradient_step(const Image& u, const FrameSequence& frames_tilde,
                    const std::vector<FlowField>& flows, double delta, int threads) {
  const int n = static_cast<int>(frames_tilde.size());
  if (n == 0 || flows.size() != frames_tilde.size())
    throw std::invalid_argument("gradient_step: frames/flows count mismatch");
  for (int i = 0; i < n; ++i)
    if (!frames_tilde[i].same_shape(u) || !flows[i].same_shape(u))
      throw std::invalid_argument("gradient_step: shape mismatch");

  std::vector<Image> per_frame(n);
  parallel_for(n, threads, [&](int i) {
    Image residual = warp_apply(u, flows[i]);
    for (std::size_t k = 0; k < residual.data.size(); ++k)
      residual.data[k] -= frames_tilde[i].data[k];
    per_frame[i] = warp_adjoint(residual, flows[i]);
  });

  Image v = u;
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < v.data.size(); ++k) v.data[k] -= delta * per_frame[i].data[k];
  return v;
}

Image inner_bregman_loop(const Image& u0, const FrameSequence& frames_tilde,
                         const std::vector<FlowField>& flows, const StabilizerConfig& cfg) {
  check_sequence(frames_tilde);
  cfg.validate(static_cast<int>(frames_tilde.size()));
  return run_inner_loop(u0, frames_tilde, flows, cfg, nullptr, 0, nullptr, nullptr);
}

FrameSequence residual_add_back(const FrameSequence& frames_tilde, const FrameSequence& frames,
                                const Image& u, const std::vector<FlowField>& flows) {
  if (frames_tilde.size() != frames.size() || frames.size() != flows.size())
    throw std::invalid_argument("residual_add_back: count mismatch");
  FrameSequence out = frames_tilde;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (!frames[i].same_shape(u) || !frames_tilde[i].same_shape(u) || !flows[i].same_shape(u))
      throw std::invalid_argument("residual_add_back: shape mismatch");
    const Image warped = warp_apply(u, flows[i]);
    for (std::size_t k = 0; k < out[i].data.size(); ++k)
      out[i].data[k] += frames[i].data[k] - warped.data[k];
  }
  return out;
}

StabilizerReport stabilize(const FrameSequence& frames, const StabilizerConfig& cfg) {
  check_sequence(frames);
  const int n = static_cast<int>(frames.size());
  if (n < 2) throw std::invalid_argument("stabilize: need at least 2 frames");
  if (frames.front().width < 32 || frames.front().height < 32)
    throw std::invalid_argument("stabilize: frames must be at least 32x32");
  cfg.validate(n);

  StabilizerReport report;
  Image u = temporal_average(frames);
  FrameSequence tilde = frames;

  for (int outer = 1; outer <= cfg.outer_iterations; ++outer) {
    const auto t_flow = Clock::now();
    std::vector<FlowField> flows(n);
    parallel_for(n, cfg.threads, [&](int i) { flows[i] = estimate_flow(u, frames[i], cfg.flow); });
    report.times.flow_seconds += seconds_since(t_flow);
    for (const FlowField& f : flows)
      if (!all_finite(f)) throw std::runtime_error("stabilize: non-finite values after flow estimation");

    if (outer == 1)
      report.outer_fidelity.push_back(dual_fidelity(u, frames, frames, flows, cfg.threads).vs_a);

    u = run_inner_loop(u, tilde, flows, cfg, &frames, outer, &report.trace, &report.times);
    require_finite(u, "inner loop");

    const auto t_add = Clock::now();
    tilde = residual_add_back(tilde, frames, u, flows);
    report.times.addback_seconds += seconds_since(t_add);
    for (const Image& f : tilde)
      if (!all_finite(f)) throw std::runtime_error("stabilize: non-finite values after residual add-back");

    const double fid = dual_fidelity(u, frames, frames, flows, cfg.threads).vs_a;
    report.outer_fidelity.push_back(fid);
    report.flows = std::move(flows);
    if (fid <= cfg.fidelity_tolerance) break;
  }
  report.u = std::move(u);
  return report;
}

}  // namespace turbstab
