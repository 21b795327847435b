#pragma once

// Simulated dialog partner: the exhaustive cascade policy mixed with a
// random policy over non-conflicting legal moves.

#include <stdexcept>

#include "ids/dialog.hpp"
#include "ids/rng.hpp"

namespace ids {

struct SimulatorConfig {
  double p = 1.0;  // probability of following the exhaustive policy

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("simulator p must lie in [0, 1]");
  }
};

/// Assert if possible, else Open, else Close; uniform within the group.
DialogAct exhaustive_act(const LegalMoves& moves, Rng& rng);
DialogAct exhaustive_act(const DialogState& view, Rng& rng);

/// Legal moves whose committed content is consistent with the view's own
/// beliefs and the commitment store. Opens and Close always qualify.
std::vector<DialogAct> non_conflicting(const DialogState& view, const LegalMoves& moves);

/// Uniform over non_conflicting(view, moves).
DialogAct random_act(const DialogState& view, const LegalMoves& moves, Rng& rng);
DialogAct random_act(const DialogState& view, Rng& rng);

/// One Bernoulli(p) draw, then the chosen policy, all on `rng`.
DialogAct hybrid_act(const DialogState& view, const LegalMoves& moves, const SimulatorConfig& cfg,
                     Rng& rng);
DialogAct hybrid_act(const DialogState& view, const SimulatorConfig& cfg, Rng& rng);

}  // namespace ids
