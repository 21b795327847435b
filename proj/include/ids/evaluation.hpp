#pragma once

// System policies, full dialogs against the simulated user, and
// success-rate-by-turn curves.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "ids/corpus.hpp"
#include "ids/qfunction.hpp"
#include "ids/user_sim.hpp"

namespace ids {

enum class UserKind { Rand, Rule };
const char* to_string(UserKind u);           // "RandU" / "RuleU"
UserKind parse_user_kind(const std::string& s);  // rand, rule, RandU, RuleU
/// RuleU follows the exhaustive policy always, RandU with probability 0.75.
SimulatorConfig simulator_for(UserKind u);

struct Setup {
  SplitMode mode = SplitMode::RB;
  UserKind user = UserKind::Rule;

  std::string name() const;  // e.g. "RB-RuleU"
  friend bool operator==(const Setup&, const Setup&) = default;
};
Setup parse_setup(const std::string& s);
/// RB, UB, SB crossed with RandU, RuleU.
std::vector<Setup> all_setups();

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  /// `moves` is nonempty. Must be safe to call concurrently.
  virtual DialogAct choose(const DialogState& view, const LegalMoves& moves, Rng& rng) const = 0;
};

class BaselinePolicy : public Policy {
 public:
  std::string name() const override { return "baseline"; }
  DialogAct choose(const DialogState& view, const LegalMoves& moves, Rng& rng) const override;
};

class RandomPolicy : public Policy {
 public:
  std::string name() const override { return "random"; }
  DialogAct choose(const DialogState& view, const LegalMoves& moves, Rng& rng) const override;
};

class CloseOnlyPolicy : public Policy {
 public:
  std::string name() const override { return "close-only"; }
  DialogAct choose(const DialogState& view, const LegalMoves& moves, Rng& rng) const override;
};

/// Greedy on a learned Q-function.
class GreedyQPolicy : public Policy {
 public:
  GreedyQPolicy(std::shared_ptr<const QFunction> q, std::string name);
  std::string name() const override { return name_; }
  DialogAct choose(const DialogState& view, const LegalMoves& moves, Rng& rng) const override;

 private:
  std::shared_ptr<const QFunction> q_;
  std::string name_;
};

/// Plays one dialog with `system` opening against the hybrid user. Appends
/// every event to `log` when given.
Outcome run_dialog(const Policy& system, const Scenario& scenario, const SimulatorConfig& user,
                   int turn_cap, Rng& rng, std::vector<Event>* log = nullptr);

struct EvalConfig {
  Setup setup;
  int n_dialogs = 2000;
  int turn_cap = 40;
  std::uint64_t seed = 1;
  Exec exec = Exec::Serial;
};

struct EvalCurve {
  std::string policy;
  std::string setup;
  std::uint64_t seed = 0;
  int n_dialogs = 0;
  std::vector<double> success_rate;  // entry t-1: fraction answered by turn t
  std::vector<int> success_turn;     // per dialog; 0 if never answered

  double at(int turn) const { return success_rate.at(static_cast<std::size_t>(turn - 1)); }
};

/// Dialog i draws its scenario from stream 2i and its play from stream
/// 2i+1 of `seed`, so every policy faces the same scenarios and the result
/// does not depend on the execution mode.
EvalCurve evaluate(const Policy& system, const Corpus& corpus, const EvalConfig& cfg);

/// "# key: value" metadata lines, then turn,success_rate.
std::string format_eval_curve(const EvalCurve& c);
/// Inverse of format_eval_curve for the metadata and rates; success_turn
/// stays empty. Throws std::invalid_argument on malformed input.
EvalCurve parse_eval_curve(const std::string& text);

}  // namespace ids
