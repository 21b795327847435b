#pragma once

// Central-difference checks of the analytic Q-function gradients on random
// parameters at random reachable dialog states.

#include <cstdint>
#include <string>
#include <vector>

#include "ids/corpus.hpp"
#include "ids/dialog.hpp"
#include "ids/rng.hpp"

namespace ids {

struct ReachableSample {
  DialogState view;  // of the participant to move
  DialogAct act;     // legal in `view`
};

/// Random RB split, then up to `max_steps` uniformly random legal acts;
/// restarts if the dialog ends first.
ReachableSample sample_reachable(const Corpus& corpus, Rng& rng, int max_steps = 12);

struct GradCheckConfig {
  int trials = 50;
  std::uint64_t seed = 1;
  double h = 1e-5;
};

struct GradCheckTrial {
  std::string model;
  double max_rel_error = 0;
  std::string worst_block;
  // paths exercised by this trial
  bool atom = false, conj = false, imp = false, sum = false, lin = false, mlp = false;
};

struct GradCheckReport {
  std::vector<GradCheckTrial> trials;
  double max_rel_error() const;
  /// Every path exercised by at least one trial.
  bool full_coverage() const;
};

/// Even trials use the embedded model, odd trials the bag MLP. Per block,
/// the error is |analytic - numeric| / max(|analytic|, |numeric|) in the
/// Frobenius norm; blocks whose two gradients are both exactly zero are
/// skipped.
GradCheckReport check_gradients(const Corpus& corpus, const GradCheckConfig& cfg);

}  // namespace ids
