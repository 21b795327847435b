#pragma once

// The policies x setups x seeds grid: train where needed, evaluate each
// cell, write one curve per cell and a summary table.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ids/checkpoint.hpp"
#include "ids/config.hpp"

namespace ids {

struct PolicySpec {
  enum class Kind { Baseline, Random, CloseOnly, Embedded, BagMlp, Checkpoint };
  Kind kind = Kind::Baseline;
  int d = 0;          // Embedded
  std::string path;   // Checkpoint
  std::string name;   // as written in the config

  bool trained() const { return kind == Kind::Embedded || kind == Kind::BagMlp; }
};

/// baseline, random, close-only, dqlwoe, dqlwe-<d>d, or checkpoint:<path>.
PolicySpec parse_policy_spec(const std::string& s);

/// Training settings for one cell: the config's, with the policy's encoder
/// and size and the cell's seed.
TrainConfig train_config_for(const RunConfig& cfg, const PolicySpec& p, std::uint64_t seed);

/// Trains on scenarios of `setup` drawn from `corpus`.
TrainResult train_on_setup(const TrainConfig& tc, const RunConfig& cfg, const Setup& setup, const Corpus& corpus);

/// Evaluation seed of one cell; the same for every policy.
std::uint64_t eval_seed_for(const RunConfig& cfg, std::uint64_t seed);

struct CellResult {
  std::string policy;
  Setup setup;
  std::uint64_t seed = 0;
  EvalCurve curve;
  bool reused = false;  // read back from an earlier run
};

/// "<policy>__<setup>__s<seed>"; the curve is that plus ".csv".
std::string cell_stem(const std::string& policy, const Setup& setup, std::uint64_t seed);

/// Writes every cell's curve, the learned cells' learning curves and
/// checkpoints, and summary.csv under `outdir`. Cells whose curve already
/// exists are read back instead of recomputed.
std::vector<CellResult> run_experiment(const RunConfig& cfg, const std::string& outdir, std::ostream* log = nullptr);

/// policy,setup,seed,sr_t5,sr_t10,sr_t15,sr_t20,sr_final
std::string format_summary(const std::vector<CellResult>& cells);

/// Median over seeds of the success rate at `turn`.
double median_success(const std::vector<CellResult>& cells, const std::string& policy, const Setup& setup, int turn);

/// Writes through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace ids
