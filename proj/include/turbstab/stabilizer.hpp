#pragma once

#include <vector>

#include "turbstab/image.hpp"
#include "turbstab/optical_flow.hpp"
#include "turbstab/regularizers.hpp"

namespace turbstab {

struct StabilizerConfig {
  double delta = 0.0;  // gradient step; 0 -> 0.5 / N at use time, must stay <= 1/N
  double lambda = 5.0;  // fidelity weight of the prox (mu = lambda/delta)
  int outer_iterations = 5;
  int inner_iterations = 20;
  double fidelity_tolerance = 1e-5;  // on sum_i ||Phi_i u - f_i||^2 / (N * pixels)
  FlowParams flow;
  RegularizerSpec regularizer;
  int threads = 1;

  void validate(int frame_count) const;
  double resolve_delta(int frame_count) const;
};

struct TraceRow {
  int outer = 0;
  int inner = 0;
  double fidelity = 0.0;   // vs the original frames f
  double objective = 0.0;  // vs the Bregman-updated frames f~ (inner-loop guard)
};

struct PhaseTimes {
  double flow_seconds = 0.0;
  double gradient_seconds = 0.0;
  double prox_seconds = 0.0;
  double addback_seconds = 0.0;
};

struct StabilizerReport {
  Image u;
  std::vector<double> outer_fidelity;  // entry 0 is the initial fidelity
  std::vector<TraceRow> trace;
  std::vector<FlowField> flows;  // from the final outer iteration
  PhaseTimes times;
};

/// Pixelwise mean of the frames (the initial guess).
Image temporal_average(const FrameSequence& frames);

/// v = u - delta * sum_i Phi_i^T (Phi_i u - f~_i).
Image gradient_step(const Image& u, const FrameSequence& frames_tilde,
                    const std::vector<FlowField>& flows, double delta, int threads = 1);

/// Alternates gradient_step and prox until inner_iterations, until the
/// relative change of sum_i ||Phi_i u - f~_i||^2 drops below 1e-4, or until a
/// step stops decreasing that quantity (the trial is then discarded), so the
/// per-iteration fidelity trace is nonincreasing.
Image inner_bregman_loop(const Image& u0, const FrameSequence& frames_tilde,
                         const std::vector<FlowField>& flows, const StabilizerConfig& cfg);

/// f~_i + f_i - Phi_i u, per frame.
FrameSequence residual_add_back(const FrameSequence& frames_tilde, const FrameSequence& frames,
                                const Image& u, const std::vector<FlowField>& flows);

/// Full alternating optimization: flow estimation, inner Bregman loop,
/// residual add-back, until the fidelity tolerance or outer_iterations.
StabilizerReport stabilize(const FrameSequence& frames, const StabilizerConfig& cfg);

}  // namespace turbstab
