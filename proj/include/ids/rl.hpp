#pragma once

// Deep Q-learning with experience replay over dialog episodes.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "ids/corpus.hpp"
#include "ids/qfunction.hpp"
#include "ids/user_sim.hpp"

namespace ids {

struct RewardConfig {
  double w_pos = 20.0;
  double w_neg = 1.0;
  double gamma = 0.99;

  void validate() const;
};

enum class Encoder { Embedded, BagMlp };
const char* to_string(Encoder e);
Encoder parse_encoder(const std::string& s);

struct TrainConfig {
  int epochs = 100;
  int dialogs_per_epoch = 2000;
  double eps_start = 1.0;
  double eps_end = 0.05;
  int eps_anneal_epochs = 50;
  int buffer_capacity = 10000;
  int batch_size = 32;
  double learning_rate = 0;  // 0: the model's default
  int target_sync_episodes = 2000;
  int train_steps_per_episode = 1;
  int turn_cap = 40;
  Encoder encoder = Encoder::Embedded;
  int d = 5;
  int d_lin = 0;  // 0: 2 d
  int hidden = 64;
  std::uint64_t seed = 1;
  Exec exec = Exec::Serial;

  void validate() const;
};

/// max(eps_end, eps_start - (eps_start - eps_end) * epoch / eps_anneal_epochs)
double epsilon(int epoch, const TrainConfig& cfg);

/// Reward for one completed turn: w_pos if the query was answered in it,
/// otherwise -w_neg.
double turn_reward(bool answered, const RewardConfig& cfg);

struct Transition {
  StateCode state;
  ActCode act;
  double reward = 0;
  StateCode next_state;
  std::vector<ActCode> next_legal;
  bool terminal = false;
};

/// Fixed-capacity FIFO ring.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);
  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t insertions() const { return insertions_; }
  /// i-th oldest transition.
  const Transition& at(std::size_t i) const;
  /// `n` indices drawn uniformly with replacement.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> items_;
  std::size_t head_ = 0;  // index of the oldest once full
  std::uint64_t insertions_ = 0;
};

/// Epsilon-greedy: uniform with probability eps, else the highest Q with
/// ties going to the act that prints first. Returns an index into `legal`.
std::size_t select_act(const QFunction& q, const StateCode& s, const std::vector<DialogAct>& legal,
                       const std::vector<ActCode>& legal_codes, double eps, Rng& rng);

/// reward if terminal, else reward + gamma * max over next legal acts.
double td_target(const Transition& t, const QFunction& target, double gamma);

/// One SGD step on the TD targets of `batch` against `target`.
double train_step(QFunction& q, const QFunction& target, const std::vector<const Transition*>& batch,
                  double lr, double gamma, Exec exec = Exec::Serial);

struct Episode {
  std::vector<Transition> transitions;
  std::vector<double> rewards;  // one per completed turn
  Outcome outcome{Outcome::Kind::Exhausted, 0};
  double total_reward() const;
  bool success() const { return outcome.kind == Outcome::Kind::Success; }
};

/// Plays one dialog with the system following epsilon-greedy on `q` and the
/// user following the hybrid simulator. The system opens; one transition
/// per system decision.
Episode run_episode(const QFunction& q, const Scenario& scenario, const SimulatorConfig& sim,
                    double eps, const RewardConfig& reward, int turn_cap, Rng& rng);

using ScenarioSource = std::function<Scenario(Rng&)>;

struct EpochStats {
  int epoch = 0;
  double mean_return = 0;
  double success_rate = 0;
  double epsilon = 0;
  double loss_mean = 0;
};

struct TrainResult {
  std::unique_ptr<QFunction> q;
  std::vector<EpochStats> curve;
};

std::unique_ptr<QFunction> make_qfunction(const TrainConfig& cfg,
                                          std::shared_ptr<const CorpusIndex> index, Rng& rng);

TrainResult train(const TrainConfig& cfg, const RewardConfig& reward, const SimulatorConfig& sim,
                  std::shared_ptr<const CorpusIndex> index, const ScenarioSource& scenarios);

/// Columns epoch,mean_return,success_rate,epsilon,loss_mean.
std::string format_learning_curve(const std::vector<EpochStats>& curve);

/// %.17g, which round-trips doubles exactly.
std::string exact(double v);

}  // namespace ids
