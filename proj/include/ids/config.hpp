#pragma once

// key = value run configuration shared by train, eval and experiment.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ids/evaluation.hpp"
#include "ids/rl.hpp"

namespace ids {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string corpus_path;  // empty: the shipped corpus
  TrainConfig train;
  RewardConfig reward;
  std::optional<double> user_p;  // overrides the setup's simulator
  Setup setup;                   // used by train

  // experiment grid
  std::vector<std::string> policies{"baseline", "dqlwoe", "dqlwe-5d", "dqlwe-10d"};
  std::vector<Setup> setups = all_setups();
  std::vector<std::uint64_t> seeds{1};
  int eval_dialogs = 2000;
  int eval_turn_cap = 40;
  std::uint64_t eval_seed = 1000;
  Exec eval_exec = Exec::Parallel;

  SimulatorConfig simulator(const Setup& s) const;
  std::string resolved_corpus_path() const;
  void validate() const;
};

std::string shipped_corpus_path();

/// One `key = value` per line; `#` starts a comment. Unknown or repeated
/// keys are errors. A relative corpus path is taken relative to `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);
/// Keys in parse order, suitable for parse_config.
std::string format_config(const RunConfig& c);

}  // namespace ids
