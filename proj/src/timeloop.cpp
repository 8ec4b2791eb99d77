#include "ks/timeloop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace ks {

void StepControl::validate() const {
  if (!(dt_min > 0.0)) {
    throw std::invalid_argument("time: dt_min must be > 0");
  }
  if (!(dt_max >= dt_min)) {
    throw std::invalid_argument("time: dt_max must be >= dt_min");
  }
  if (!(dt_init >= dt_min && dt_init <= dt_max)) {
    throw std::invalid_argument("time: dt_init must lie in [dt_min, dt_max]");
  }
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("time: t_end must be > 0");
  }
  if (!(growth >= 1.0)) {
    throw std::invalid_argument("time: growth must be >= 1");
  }
  if (!(shrink > 0.0 && shrink < 1.0)) {
    throw std::invalid_argument("time: shrink must be in (0,1)");
  }
  if (!(bound_tol >= 0.0)) {
    throw std::invalid_argument("time: bound_tol must be >= 0");
  }
  if (max_rejects < 1) {
    throw std::invalid_argument("time: max_rejects must be >= 1");
  }
}

State step_euler(const State& s, double dt, const System& sys) {
  const std::vector<double> fu = rhs_u(s, sys.mesh, sys.K, sys.M, sys.stencil,
                                       sys.params);
  const std::vector<double> fv = rhs_v(s, sys.mesh, sys.K, sys.M);
  State next;
  next.t = s.t + dt;
  next.u.resize(s.u.size());
  next.v.resize(s.v.size());
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    next.u[i] = s.u[i] + dt * fu[i];
    next.v[i] = s.v[i] + dt * fv[i];
  }
  return next;
}

namespace {

struct BoundCheck {
  bool ok = true;
  int node = -1;
  std::string bound;
  double value = 0.0;
};

BoundCheck check_bounds(const State& s, double v_max_bound, double tol) {
  BoundCheck c;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    if (s.u[i] < -tol) {
      c = {false, static_cast<int>(i), "u >= 0", s.u[i]};
      return c;
    }
    if (!(s.v[i] > 0.0)) {
      c = {false, static_cast<int>(i), "v > 0", s.v[i]};
      return c;
    }
    if (s.v[i] > v_max_bound * (1.0 + tol)) {
      c = {false, static_cast<int>(i), "v <= max v(0)", s.v[i]};
      return c;
    }
  }
  return c;
}

}  // namespace

Trajectory advance(const State& initial, const StepControl& control,
                   const System& sys, double output_every) {
  control.validate();
  sys.params.validate();
  if (output_every < 0.0) {
    throw std::invalid_argument("time: output interval must be >= 0");
  }

  Trajectory out;
  out.v_max_bound = *std::max_element(initial.v.begin(), initial.v.end());

  State s = initial;
  out.snapshots.push_back(s);
  DiagnosticsRecord rec = snapshot(s, sys.mesh, sys.K, sys.M, out.v_max_bound);
  out.records.push_back(rec);

  double dt = control.dt_init;
  out.stats.min_dt_used = std::numeric_limits<double>::infinity();

  // Smallest multiple of the output interval strictly beyond t; multiples are
  // formed by multiplication so every run lands on bitwise identical times.
  const auto next_output_after = [&](double t) {
    if (output_every <= 0.0) return control.t_end;
    long k = static_cast<long>(std::floor(t / output_every)) + 1;
    double next = output_every * static_cast<double>(k);
    while (next <= t) {
      k += 1;
      next = output_every * static_cast<double>(k);
    }
    return next;
  };
  double next_output = next_output_after(s.t);

  while (s.t < control.t_end) {
    // Land exactly on the next output time and on t_end.
    const double stop = std::min(next_output, control.t_end);
    double attempt = std::min(dt, stop - s.t);
    const bool hits_stop = attempt >= stop - s.t;

    int rejects = 0;
    State candidate;
    for (;;) {
      candidate = step_euler(s, attempt, sys);
      if (hits_stop && rejects == 0) candidate.t = stop;
      const BoundCheck c =
          check_bounds(candidate, out.v_max_bound, control.bound_tol);
      if (c.ok) break;
      rejects += 1;
      out.stats.rejected += 1;
      attempt *= control.shrink;
      if (attempt < control.dt_min) {
        throw StepFailure("step size fell below dt_min at t = " +
                              std::to_string(s.t) + " (" + c.bound +
                              " violated at node " + std::to_string(c.node) +
                              ", value " + std::to_string(c.value) + ")",
                          c.node, c.bound, c.value);
      }
      if (rejects > control.max_rejects) {
        throw StepFailure("reject budget exhausted at t = " +
                              std::to_string(s.t) + " (" + c.bound +
                              " violated at node " + std::to_string(c.node) +
                              ", value " + std::to_string(c.value) + ")",
                          c.node, c.bound, c.value);
      }
    }

    for (double& ui : candidate.u) ui = std::max(ui, 0.0);
    for (double& vi : candidate.v) vi = std::min(vi, out.v_max_bound);
    s = std::move(candidate);

    out.stats.accepted += 1;
    out.stats.min_dt_used = std::min(out.stats.min_dt_used, attempt);
    dt = std::min(attempt * control.growth, control.dt_max);

    DiagnosticsRecord r = snapshot(s, sys.mesh, sys.K, sys.M, out.v_max_bound);
    accumulate(r, out.records.back());
    out.records.push_back(r);

    if (s.t >= stop) {
      if (output_every > 0.0 && stop < control.t_end) {
        out.snapshots.push_back(s);
      }
      if (stop >= control.t_end) break;
      next_output = next_output_after(s.t);
    }
  }

  out.snapshots.push_back(s);
  out.final_state = std::move(s);
  if (out.stats.accepted == 0) out.stats.min_dt_used = 0.0;
  return out;
}

}  // namespace ks
