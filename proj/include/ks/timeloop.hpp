#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ks/diagnostics.hpp"
#include "ks/fem.hpp"
#include "ks/mesh.hpp"
#include "ks/scheme.hpp"

namespace ks {

// Everything the semi-discrete right-hand sides need; references must
// outlive the integration.
struct System {
  const Mesh& mesh;
  const StiffnessMatrix& K;
  const LumpedMass& M;
  const SymmetricStencil& stencil;
  const SchemeParams& params;
};

struct StepControl {
  double dt_init = 1e-3;
  double dt_min = 1e-10;
  double dt_max = 1e-3;
  double t_end = 1.0;
  double growth = 1.2;
  double shrink = 0.5;
  double bound_tol = 1e-12;  // accepted overshoot beyond the exact bounds
  int max_rejects = 60;      // per step

  void validate() const;  // throws std::invalid_argument
};

// Raised when no admissible step size exists (dt underflows dt_min or the
// reject budget is exhausted). Carries the node and bound of the last
// violation.
struct StepFailure : std::runtime_error {
  StepFailure(const std::string& msg, int node_, const std::string& bound_,
              double value_)
      : std::runtime_error(msg), node(node_), bound(bound_), value(value_) {}
  int node;
  std::string bound;
  double value;
};

// One explicit Euler step; no admissibility check.
State step_euler(const State& s, double dt, const System& sys);

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  double min_dt_used = 0.0;
};

struct Trajectory {
  std::vector<State> snapshots;            // t = 0, output times, t_end
  std::vector<DiagnosticsRecord> records;  // one per accepted step (plus t = 0)
  State final_state;
  StepStats stats;
  double v_max_bound = 0.0;  // max of v at t = 0; upper bound enforced on v
};

// Explicit Euler with reject/shrink control. A candidate step is rejected if
// min u < -bound_tol, min v <= 0, or max v > v_max_bound*(1+bound_tol); on
// acceptance u is clamped up to 0 and v down to v_max_bound, and dt grows by
// the growth factor (capped at dt_max). Steps are truncated to land exactly
// on output times and t_end. Deterministic for fixed inputs.
Trajectory advance(const State& initial, const StepControl& control,
                   const System& sys, double output_every = 0.0);

}  // namespace ks
