// End-to-end acceptance run: one PASS/FAIL line per criterion, exit status
// 0 only if all pass. Criterion 8 trains 15 policies and takes a while.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "ids/checkpoint.hpp"
#include "ids/config.hpp"
#include "ids/experiment.hpp"
#include "ids/gradient_check.hpp"
#include "ids/rl.hpp"
#include "oracle.hpp"
#include "random_corpus.hpp"

using namespace ids;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Corpus shipped() { return load_corpus(shipped_corpus_path()); }

fs::path work_dir(const std::string& name) {
  fs::path p = fs::current_path() / "acceptance_out" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------

Verdict inference_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  testing::RandomCorpus gen(2024, {.max_beliefs = 8, .predicates = 4, .max_arity = 3});
  int mismatches = 0, nonempty = 0;
  for (int i = 0; i < 1000; ++i) {
    BeliefSet bs = gen.belief_set();
    auto targets = gen.targets();
    auto got = find_arguments(bs, targets);
    mismatches += got != oracle::arguments(bs, targets);
    nonempty += !got.empty();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {mismatches == 0 && secs < 60,
          fmt("1000 random belief sets, %d mismatches, %d with arguments, %.1fs", mismatches, nonempty, secs)};
}

bool minimal(const Argument& a) {
  const std::vector<Belief> items(a.support.begin(), a.support.end());
  const std::size_t n = items.size();
  auto subset = [&](unsigned long mask) {
    BeliefSet s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) s.insert(items[i]);
    return s;
  };
  if (!oracle::derives(a.support, a.claim)) return false;
  if (n <= 5) {
    for (unsigned long mask = 0; mask + 1 < (1ul << n); ++mask)
      if (oracle::derives(subset(mask), a.claim)) return false;
    return true;
  }
  // Derivation is monotone, so the maximal proper subsets decide it.
  for (std::size_t drop = 0; drop < n; ++drop)
    if (oracle::derives(subset(((1ul << n) - 1) & ~(1ul << drop)), a.claim)) return false;
  return true;
}

Verdict support_minimality() {
  const Corpus c = shipped();
  Rng rng(91);
  long checked = 0, violations = 0, max_support = 0;
  const std::vector<Setup> setups = all_setups();
  for (int d = 0; d < 200; ++d) {
    const Setup& setup = setups[d % setups.size()];
    Scenario sc = generate_scenario(c, setup.mode, rng);
    DialogViews v = init_dialog(sc.query, sc.sigma_sys, sc.sigma_usr);
    const SimulatorConfig sim = simulator_for(setup.user);
    while (!is_terminal(v.system, 40)) {
      const Participant actor = v.system.actor_to_move;
      const LegalMoves m = legal_moves(v.of(actor));
      for (const auto& a : m.asserts) {
        ++checked;
        violations += !minimal(a.argument);
        max_support = std::max<long>(max_support, a.argument.support.size());
      }
      apply_act(v, hybrid_act(v.of(actor), m, sim, rng), actor);
    }
  }
  return {violations == 0 && checked > 0,
          fmt("%ld generated arguments over 200 dialogs, largest support %ld, %ld violations", checked, max_support,
              violations)};
}

Verdict legal_move_oracle() {
  int states = 0, mismatches = 0;
  // Half from random corpora, half from the shipped one.
  testing::RandomCorpus gen(57, {.max_beliefs = 7, .constants = 2});
  Rng rng(58);
  while (states < 250) {
    BeliefSet all = gen.belief_set();
    BeliefSet sys, usr;
    for (const auto& b : all) (gen.coin(0.5) ? sys : usr).insert(b);
    if (!is_consistent(sys) || !is_consistent(usr)) continue;
    DialogViews v = init_dialog(Query{gen.targets(2)}, sys, usr);
    for (int step = 0; step < 12 && states < 250 && !is_terminal(v.system, 40); ++step) {
      const Participant actor = v.system.actor_to_move;
      const auto moves = legal_moves(v.of(actor)).all();
      mismatches += std::set<DialogAct>(moves.begin(), moves.end()) != oracle::legal_moves(v.of(actor));
      ++states;
      apply_act(v, moves[rng.index(moves.size())], actor);
    }
  }
  const Corpus c = shipped();
  while (states < 500) {
    Scenario sc = generate_scenario(c, SplitMode::RB, rng);
    DialogViews v = init_dialog(sc.query, sc.sigma_sys, sc.sigma_usr);
    while (states < 500 && !is_terminal(v.system, 40)) {
      const Participant actor = v.system.actor_to_move;
      const auto moves = legal_moves(v.of(actor)).all();
      mismatches += std::set<DialogAct>(moves.begin(), moves.end()) != oracle::legal_moves(v.of(actor));
      ++states;
      apply_act(v, moves[rng.index(moves.size())], actor);
    }
  }
  return {mismatches == 0, fmt("%d reachable states, %d mismatches", states, mismatches)};
}

Verdict exhaustive_completeness() {
  const Corpus c = shipped();
  Rng rng(4);
  int answerable = 0, answered = 0, worst = 0;
  for (int i = 0; i < 200; ++i) {
    Scenario sc = generate_scenario(c, SplitMode::RB, rng);
    BeliefSet both = sc.sigma_sys;
    for (const auto& b : sc.sigma_usr) both.insert(b);
    bool derivable = false;
    for (const auto& f : oracle::closure(both)) {
      std::map<std::string, std::string> binding;
      derivable |= sc.query.atoms.size() == 1 && oracle::matches(sc.query.atoms[0], f, binding);
    }
    if (!derivable) continue;
    ++answerable;
    Outcome o = run_dialog(BaselinePolicy{}, sc, SimulatorConfig{1.0}, 40, rng);
    if (o.kind == Outcome::Kind::Success) {
      ++answered;
      worst = std::max(worst, o.turns_used);
    }
  }
  return {answerable == 200 && answered == answerable,
          fmt("%d/%d answerable scenarios answered, slowest in %d turns", answered, answerable, worst)};
}

Verdict gradient_check() {
  GradCheckConfig cfg;
  cfg.trials = 50;
  cfg.h = 1e-5;
  GradCheckReport r = check_gradients(shipped(), cfg);
  const double err = r.max_rel_error();
  return {err <= 1e-4 && r.full_coverage() && r.trials.size() >= 50,
          fmt("%zu trials, max relative error %.3g, all paths covered: %s", r.trials.size(), err,
              r.full_coverage() ? "yes" : "no")};
}

Verdict schedule_and_reward() {
  TrainConfig tc;
  const bool eps = epsilon(0, tc) == 1.0 && std::abs(epsilon(50, tc) - 0.05) < 1e-15 && epsilon(99, tc) == 0.05;

  // Look for an episode answered in its third turn.
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng init(1);
  EmbeddedQ q(ix, 5, 10, init);
  Rng rng(2);
  std::vector<double> rewards;
  for (int i = 0; i < 2000 && rewards.empty(); ++i) {
    Episode ep = run_episode(q, generate_scenario(c, SplitMode::RB, rng), SimulatorConfig{1.0}, 1.0, RewardConfig{},
                             40, rng);
    if (ep.success() && ep.outcome.turns_used == 3) rewards = ep.rewards;
  }
  const bool rw = rewards == std::vector<double>{-1, -1, 20};
  std::string shown;
  for (double r : rewards) shown += (shown.empty() ? "" : ", ") + fmt("%g", r);
  return {eps && rw, fmt("epsilon(0)=%g epsilon(50)=%g epsilon(99)=%g, turn-3 success rewards (%s)", epsilon(0, tc),
                         epsilon(50, tc), epsilon(99, tc), shown.c_str())};
}

Verdict one_step_sanity() {
  const auto t0 = std::chrono::steady_clock::now();
  const Corpus c = testing::one_step_corpus();
  auto ix = std::make_shared<const CorpusIndex>(c);
  TrainConfig tc;
  tc.epochs = 5;
  tc.dialogs_per_epoch = 200;
  tc.encoder = Encoder::Embedded;
  tc.d = 5;
  TrainResult r = train(tc, RewardConfig{}, SimulatorConfig{1.0}, ix, [](Rng&) { return testing::one_step_scenario(); });
  GreedyQPolicy greedy(std::shared_ptr<const QFunction>(std::move(r.q)), "dqlwe-5d");
  Rng rng(3);
  int answered = 0, at_once = 0;
  for (int i = 0; i < 500; ++i) {
    Outcome o = run_dialog(greedy, testing::one_step_scenario(), SimulatorConfig{1.0}, 40, rng);
    answered += o.kind == Outcome::Kind::Success;
    at_once += o.kind == Outcome::Kind::Success && o.turns_used == 1;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double rate = answered / 500.0;
  return {rate >= 0.95 && secs < 300,
          fmt("greedy success %.3f over 500 dialogs (%.3f on turn 1), %.1fs", rate, at_once / 500.0, secs)};
}

Verdict fig3_reduced() {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = load_config(IDS_CONFIG_DIR "/fig3_reduced.conf");
  auto cells = run_experiment(cfg, work_dir("fig3").string());

  RunConfig bag = cfg;
  bag.policies = {"dqlwoe"};
  bag.setups = {Setup{SplitMode::RB, UserKind::Rule}};
  for (auto& c : run_experiment(bag, work_dir("fig3_dqlwoe").string())) cells.push_back(std::move(c));

  auto med = [&](const char* policy, const char* setup, int turn) {
    return median_success(cells, policy, parse_setup(setup), turn);
  };
  bool a = true, b = true;
  std::string detail;
  for (const char* s : {"SB-RuleU", "RB-RuleU"}) {
    const double q = med("dqlwe-5d", s, 10), base = med("baseline", s, 10);
    a &= q >= base;
    detail += fmt("(a) %s t10 %.3f vs %.3f; ", s, q, base);
  }
  for (const char* s : {"UB-RuleU", "UB-RandU"}) {
    double worst = 0;
    int at = 0;
    for (int t = 15; t <= cfg.eval_turn_cap; ++t) {
      const double gap = std::abs(med("dqlwe-5d", s, t) - med("baseline", s, t));
      if (gap > worst) {
        worst = gap;
        at = t;
      }
    }
    b &= worst <= 0.05;
    detail += fmt("(b) %s max gap %.3f at t%d; ", s, worst, at);
  }
  const double qe = med("dqlwe-5d", "RB-RuleU", 10), qb = med("dqlwoe", "RB-RuleU", 10);
  const bool cc = qe >= qb;
  const double mins = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60;
  detail += fmt("(c) RB-RuleU t10 %.3f vs %.3f; %.1f min", qe, qb, mins);
  std::printf("    8(a) %s  8(b) %s  8(c) %s\n", a ? "PASS" : "FAIL", b ? "PASS" : "FAIL", cc ? "PASS" : "FAIL");
  return {a && b && cc, detail};
}

Verdict determinism() {
  RunConfig cfg;
  cfg.policies = {"baseline", "dqlwe-5d", "dqlwoe"};
  cfg.setups = {Setup{SplitMode::RB, UserKind::Rand}};
  cfg.seeds = {5};
  cfg.train.epochs = 3;
  cfg.train.dialogs_per_epoch = 100;
  cfg.train.eps_anneal_epochs = 2;
  cfg.train.target_sync_episodes = 100;
  cfg.eval_dialogs = 300;
  const fs::path a = work_dir("det_a"), b = work_dir("det_b");
  run_experiment(cfg, a.string());
  run_experiment(cfg, b.string());
  int files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    ++files;
    const fs::path other = b / e.path().filename();
    differ += !fs::exists(other) || read_text_file(e.path().string()) != read_text_file(other.string());
  }
  int count_b = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(b)) ++count_b;
  return {differ == 0 && files == count_b && files == 8,
          fmt("%d output files (curves, learning curves, checkpoints, summary), %d differ", files, differ)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {1, inference_oracle},   {2, support_minimality}, {3, legal_move_oracle},
      {4, exhaustive_completeness}, {5, gradient_check}, {6, schedule_and_reward},
      {7, one_step_sanity},    {8, fig3_reduced},       {9, determinism},
  };
  int failed = 0;
  for (const auto& [n, run] : criteria) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("criterion %d: %s: %s\n", n, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
