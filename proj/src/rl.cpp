#include "ids/rl.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace ids {

void RewardConfig::validate() const {
  if (!(w_pos >= 0) || !(w_neg >= 0)) throw std::invalid_argument("rewards must be non-negative");
  if (!(gamma >= 0 && gamma <= 1)) throw std::invalid_argument("gamma must lie in [0, 1]");
}

const char* to_string(Encoder e) { return e == Encoder::Embedded ? "embedded" : "bagmlp"; }

Encoder parse_encoder(const std::string& s) {
  if (s == "embedded") return Encoder::Embedded;
  if (s == "bagmlp") return Encoder::BagMlp;
  throw std::invalid_argument("unknown encoder '" + s + "' (expected embedded or bagmlp)");
}

void TrainConfig::validate() const {
  if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
  if (eps_start < eps_end) throw std::invalid_argument("eps_start must be >= eps_end");
  for (int v : {dialogs_per_epoch, eps_anneal_epochs, buffer_capacity, batch_size, target_sync_episodes,
                turn_cap, d, hidden})
    if (v < 1) throw std::invalid_argument("counts and sizes must be >= 1");
  if (train_steps_per_episode < 0) throw std::invalid_argument("train_steps_per_episode must be >= 0");
  if (learning_rate < 0 || d_lin < 0) throw std::invalid_argument("learning_rate and d_lin must be >= 0");
}

double epsilon(int epoch, const TrainConfig& cfg) {
  if (epoch < 0) throw std::invalid_argument("epoch must be >= 0");
  const double e = cfg.eps_start - (cfg.eps_start - cfg.eps_end) * epoch / cfg.eps_anneal_epochs;
  return std::max(cfg.eps_end, e);
}

double turn_reward(bool answered, const RewardConfig& cfg) { return answered ? cfg.w_pos : -cfg.w_neg; }

// ---------------------------------------------------------------------------

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay capacity must be >= 1");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  ++insertions_;
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
    return;
  }
  items_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= items_.size()) throw std::out_of_range("replay index");
  return items_[(head_ + i) % items_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = rng.index(items_.size());
  return out;
}

// ---------------------------------------------------------------------------

std::size_t select_act(const QFunction& q, const StateCode& s, const std::vector<DialogAct>& legal,
                       const std::vector<ActCode>& codes, double eps, Rng& rng) {
  if (legal.empty()) throw std::invalid_argument("select_act with no legal moves");
  if (rng.bernoulli(eps)) return rng.index(legal.size());
  std::vector<double> values;
  q.q_many(s, codes, values);
  const double best = *std::max_element(values.begin(), values.end());
  std::size_t pick = legal.size();
  std::string pick_text;
  for (std::size_t i = 0; i < legal.size(); ++i) {
    if (values[i] != best) continue;
    if (pick == legal.size()) {
      pick = i;
      continue;
    }
    if (pick_text.empty()) pick_text = to_string(legal[pick]);
    std::string text = to_string(legal[i]);
    if (text < pick_text) {
      pick = i;
      pick_text = std::move(text);
    }
  }
  return pick;
}

double td_target(const Transition& t, const QFunction& target, double gamma) {
  if (t.terminal) return t.reward;
  if (t.next_legal.empty()) throw std::invalid_argument("non-terminal transition without next legal acts");
  std::vector<double> values;
  target.q_many(t.next_state, t.next_legal, values);
  return t.reward + gamma * *std::max_element(values.begin(), values.end());
}

double train_step(QFunction& q, const QFunction& target, const std::vector<const Transition*>& batch,
                  double lr, double gamma, Exec exec) {
  std::vector<Sample> samples;
  samples.reserve(batch.size());
  for (const Transition* t : batch) samples.push_back({&t->state, &t->act, td_target(*t, target, gamma)});
  return sgd_step(q, samples, lr, exec);
}

// ---------------------------------------------------------------------------

double Episode::total_reward() const {
  double r = 0;
  for (double x : rewards) r += x;
  return r;
}

Episode run_episode(const QFunction& q, const Scenario& scenario, const SimulatorConfig& sim,
                    double eps, const RewardConfig& reward, int turn_cap, Rng& rng) {
  const CorpusIndex& ix = q.index();
  Episode ep;
  DialogViews v = init_dialog(scenario.query, scenario.sigma_sys, scenario.sigma_usr, Participant::System);
  std::vector<DialogAct> legal = legal_moves(v.system).all();
  std::vector<ActCode> codes = ix.encode(legal);
  StateCode s = ix.encode(v.system);

  auto finish = [&](Transition t, double r) {
    t.reward = r;
    t.terminal = true;
    t.next_state = ix.encode(v.system);
    ep.rewards.push_back(r);
    ep.transitions.push_back(std::move(t));
    ep.outcome = *is_terminal(v.system, turn_cap);
  };

  if (auto done = is_terminal(v.system, turn_cap)) {
    ep.outcome = *done;
    return ep;
  }
  for (;;) {
    const std::size_t k = select_act(q, s, legal, codes, eps, rng);
    Transition t{s, codes[k], 0, {}, {}, false};
    apply_act(v, legal[k], Participant::System);
    if (v.system.success_turn) return finish(std::move(t), turn_reward(true, reward)), ep;
    if (is_terminal(v.system, turn_cap)) return finish(std::move(t), turn_reward(false, reward)), ep;

    apply_act(v, hybrid_act(v.user, sim, rng), Participant::User);
    if (v.system.success_turn) return finish(std::move(t), turn_reward(true, reward)), ep;
    if (is_terminal(v.system, turn_cap)) return finish(std::move(t), turn_reward(false, reward)), ep;

    t.reward = turn_reward(false, reward);
    ep.rewards.push_back(t.reward);
    legal = legal_moves(v.system).all();
    codes = ix.encode(legal);
    s = ix.encode(v.system);
    t.next_state = s;
    t.next_legal = codes;
    ep.transitions.push_back(std::move(t));
  }
}

// ---------------------------------------------------------------------------

std::unique_ptr<QFunction> make_qfunction(const TrainConfig& cfg,
                                          std::shared_ptr<const CorpusIndex> index, Rng& rng) {
  if (cfg.encoder == Encoder::Embedded)
    return std::make_unique<EmbeddedQ>(std::move(index), cfg.d, cfg.d_lin > 0 ? cfg.d_lin : 2 * cfg.d, rng);
  return std::make_unique<BagMlpQ>(std::move(index), cfg.hidden, rng);
}

TrainResult train(const TrainConfig& cfg, const RewardConfig& reward, const SimulatorConfig& sim,
                  std::shared_ptr<const CorpusIndex> index, const ScenarioSource& scenarios) {
  cfg.validate();
  reward.validate();
  sim.validate();
  Rng init_rng(stream_seed(cfg.seed, 0));
  Rng env_rng(stream_seed(cfg.seed, 1));
  Rng replay_rng(stream_seed(cfg.seed, 2));

  TrainResult result;
  result.q = make_qfunction(cfg, std::move(index), init_rng);
  std::unique_ptr<QFunction> target = result.q->clone();
  const double lr = cfg.learning_rate > 0 ? cfg.learning_rate : result.q->default_learning_rate();
  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));
  long episodes = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    EpochStats st;
    st.epoch = epoch;
    st.epsilon = epsilon(epoch, cfg);
    double loss_sum = 0;
    long steps = 0;
    int successes = 0;
    for (int i = 0; i < cfg.dialogs_per_epoch; ++i) {
      Scenario sc = scenarios(env_rng);
      Episode ep = run_episode(*result.q, sc, sim, st.epsilon, reward, cfg.turn_cap, env_rng);
      st.mean_return += ep.total_reward();
      successes += ep.success();
      for (auto& t : ep.transitions) buffer.push(std::move(t));
      if (buffer.size() >= static_cast<std::size_t>(cfg.batch_size)) {
        for (int k = 0; k < cfg.train_steps_per_episode; ++k) {
          std::vector<const Transition*> batch;
          for (std::size_t j : buffer.sample_indices(cfg.batch_size, replay_rng)) batch.push_back(&buffer.at(j));
          loss_sum += train_step(*result.q, *target, batch, lr, reward.gamma, cfg.exec);
          ++steps;
        }
      }
      if (++episodes % cfg.target_sync_episodes == 0) target = result.q->clone();
    }
    st.mean_return /= cfg.dialogs_per_epoch;
    st.success_rate = static_cast<double>(successes) / cfg.dialogs_per_epoch;
    st.loss_mean = steps ? loss_sum / steps : 0.0;
    result.curve.push_back(st);
  }
  return result;
}

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_learning_curve(const std::vector<EpochStats>& curve) {
  std::string out = "epoch,mean_return,success_rate,epsilon,loss_mean\n";
  char buf[160];
  for (const auto& s : curve) {
    std::snprintf(buf, sizeof buf, "%d,%.6f,%.6f,%.6f,%.6f\n", s.epoch, s.mean_return, s.success_rate,
                  s.epsilon, s.loss_mean);
    out += buf;
  }
  return out;
}

}  // namespace ids
