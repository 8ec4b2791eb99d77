#pragma once

#include <iosfwd>

#include "ks/config.hpp"

namespace ks {

// Exit codes of the solve driver (and the CLI).
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitStepFailure = 2;
inline constexpr int kExitInvariantFailure = 3;

// Full pipeline: build mesh, assemble, integrate, write outputs, print a
// final invariant summary (one pass/fail line per check). Returns an exit
// code instead of throwing.
int run_simulation(const SimulationConfig& cfg, std::ostream& log);

}  // namespace ks
