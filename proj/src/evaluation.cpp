#include "ids/evaluation.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "ids/rl.hpp"

namespace ids {

const char* to_string(UserKind u) { return u == UserKind::Rand ? "RandU" : "RuleU"; }

UserKind parse_user_kind(const std::string& s) {
  if (s == "rand" || s == "RandU") return UserKind::Rand;
  if (s == "rule" || s == "RuleU") return UserKind::Rule;
  throw std::invalid_argument("unknown user kind '" + s + "' (expected rand or rule)");
}

SimulatorConfig simulator_for(UserKind u) { return SimulatorConfig{u == UserKind::Rule ? 1.0 : 0.75}; }

std::string Setup::name() const { return std::string(to_string(mode)) + "-" + to_string(user); }

Setup parse_setup(const std::string& s) {
  const auto dash = s.find('-');
  if (dash == std::string::npos) throw std::invalid_argument("setup '" + s + "' is not MODE-USER");
  return Setup{parse_split_mode(s.substr(0, dash)), parse_user_kind(s.substr(dash + 1))};
}

std::vector<Setup> all_setups() {
  std::vector<Setup> out;
  for (SplitMode m : {SplitMode::RB, SplitMode::UB, SplitMode::SB})
    for (UserKind u : {UserKind::Rand, UserKind::Rule}) out.push_back({m, u});
  return out;
}

DialogAct BaselinePolicy::choose(const DialogState&, const LegalMoves& moves, Rng& rng) const {
  return exhaustive_act(moves, rng);
}

DialogAct RandomPolicy::choose(const DialogState& view, const LegalMoves& moves, Rng& rng) const {
  return random_act(view, moves, rng);
}

DialogAct CloseOnlyPolicy::choose(const DialogState&, const LegalMoves& moves, Rng&) const {
  if (moves.closes.empty()) throw DialogError("no Close available");
  return moves.closes.front();
}

GreedyQPolicy::GreedyQPolicy(std::shared_ptr<const QFunction> q, std::string name)
    : q_(std::move(q)), name_(std::move(name)) {
  if (!q_) throw std::invalid_argument("GreedyQPolicy needs a Q-function");
}

DialogAct GreedyQPolicy::choose(const DialogState& view, const LegalMoves& moves, Rng& rng) const {
  std::vector<DialogAct> legal = moves.all();
  const auto& ix = q_->index();
  return legal[select_act(*q_, ix.encode(view), legal, ix.encode(legal), 0.0, rng)];
}

Outcome run_dialog(const Policy& system, const Scenario& scenario, const SimulatorConfig& user,
                   int turn_cap, Rng& rng, std::vector<Event>* log) {
  DialogViews v = init_dialog(scenario.query, scenario.sigma_sys, scenario.sigma_usr, Participant::System);
  for (;;) {
    if (auto done = is_terminal(v.system, turn_cap)) return *done;
    const Participant actor = v.system.actor_to_move;
    DialogAct act = actor == Participant::System ? system.choose(v.system, legal_moves(v.system), rng)
                                                 : hybrid_act(v.user, user, rng);
    Event e = apply_act(v, act, actor);
    if (log) log->push_back(std::move(e));
  }
}

EvalCurve evaluate(const Policy& system, const Corpus& corpus, const EvalConfig& cfg) {
  if (cfg.n_dialogs < 1 || cfg.turn_cap < 1) throw std::invalid_argument("n_dialogs and turn_cap must be >= 1");
  const SimulatorConfig user = simulator_for(cfg.setup.user);
  EvalCurve c;
  c.policy = system.name();
  c.setup = cfg.setup.name();
  c.seed = cfg.seed;
  c.n_dialogs = cfg.n_dialogs;
  c.success_turn.assign(cfg.n_dialogs, 0);

  auto one = [&](int i) {
    Rng scen_rng(stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i)));
    Rng play_rng(stream_seed(cfg.seed, 2 * static_cast<std::uint64_t>(i) + 1));
    Scenario sc = generate_scenario(corpus, cfg.setup.mode, scen_rng);
    Outcome o = run_dialog(system, sc, user, cfg.turn_cap, play_rng);
    c.success_turn[i] = o.kind == Outcome::Kind::Success ? o.turns_used : 0;
  };
  if (cfg.exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (int i = 0; i < cfg.n_dialogs; ++i) one(i);
  } else {
    for (int i = 0; i < cfg.n_dialogs; ++i) one(i);
  }

  std::vector<int> by_turn(cfg.turn_cap + 1, 0);
  for (int t : c.success_turn)
    if (t > 0) ++by_turn[t];
  int running = 0;
  for (int t = 1; t <= cfg.turn_cap; ++t) {
    running += by_turn[t];
    c.success_rate.push_back(static_cast<double>(running) / cfg.n_dialogs);
  }
  return c;
}

std::string format_eval_curve(const EvalCurve& c) {
  std::string out = "# policy: " + c.policy + "\n# setup: " + c.setup + "\n# seed: " + std::to_string(c.seed) +
                    "\n# n_dialogs: " + std::to_string(c.n_dialogs) + "\nturn,success_rate\n";
  char buf[64];
  for (std::size_t t = 0; t < c.success_rate.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu,%.6f\n", t + 1, c.success_rate[t]);
    out += buf;
  }
  return out;
}

EvalCurve parse_eval_curve(const std::string& text) {
  EvalCurve c;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  auto bad = [](const std::string& why) { return std::invalid_argument("malformed curve: " + why); };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) throw bad(line);
      const std::string key = line.substr(2, colon - 2), value = line.substr(colon + 2);
      if (key == "policy") c.policy = value;
      else if (key == "setup") c.setup = value;
      else if (key == "seed") c.seed = std::stoull(value);
      else if (key == "n_dialogs") c.n_dialogs = std::stoi(value);
      continue;
    }
    if (!header) {
      if (line != "turn,success_rate") throw bad("missing header");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw bad(line);
    if (std::stoul(line.substr(0, comma)) != c.success_rate.size() + 1) throw bad("turns out of order");
    c.success_rate.push_back(std::stod(line.substr(comma + 1)));
  }
  if (!header || c.success_rate.empty()) throw bad("no rows");
  return c;
}

}  // namespace ids
