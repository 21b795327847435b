// Command-line front end: train, eval, experiment, play, check-gradients.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "ids/checkpoint.hpp"
#include "ids/config.hpp"
#include "ids/experiment.hpp"
#include "ids/gradient_check.hpp"
#include "ids/play.hpp"

using namespace ids;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
  if (!f) throw std::runtime_error("failed writing " + path);
}

// A system policy by name, or a checkpoint path. Sets `corpus` from the
// checkpoint when one is loaded.
std::unique_ptr<Policy> policy_from(const std::string& name, Corpus& corpus, bool& corpus_set) {
  if (name == "baseline") return std::make_unique<BaselinePolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>();
  if (name == "close-only") return std::make_unique<CloseOnlyPolicy>();
  LoadedModel m = load_checkpoint(name);
  corpus = m.corpus;
  corpus_set = true;
  return std::make_unique<GreedyQPolicy>(m.q, m.q->model());
}

Exec parse_exec(const std::string& s) {
  if (s == "serial") return Exec::Serial;
  if (s == "parallel") return Exec::Parallel;
  throw UsageError("--exec must be serial or parallel");
}

template <class F>
auto usage(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inquiry dialog workbench: argumentation engine, simulated users and Q-learning policies"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a Q-function policy on one setup");
  std::string train_config, train_out, train_curve, train_setup;
  std::uint64_t train_seed = 0;
  bool train_seed_set = false;
  train_cmd->add_option("--config", train_config, "Run configuration (key = value)")->required();
  train_cmd->add_option("--out", train_out, "Checkpoint to write")->required();
  train_cmd->add_option("--seed", train_seed, "Training seed (default: config)")
      ->each([&](const std::string&) { train_seed_set = true; });
  train_cmd->add_option("--setup", train_setup, "Setup such as RB-RuleU (default: config)");
  train_cmd->add_option("--curve", train_curve, "Learning-curve CSV (default: <out>.learning.csv)");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Success rate by turn of one policy in one setup");
  std::string eval_policy, eval_mode, eval_user = "rule", eval_out, eval_corpus, eval_exec = "parallel";
  int eval_dialogs = 2000, eval_cap = 40;
  std::uint64_t eval_seed = 1;
  eval_cmd->add_option("--policy", eval_policy, "Checkpoint path, baseline, random or close-only")->required();
  eval_cmd->add_option("--setup", eval_mode, "Belief split: RB, UB or SB")->required();
  eval_cmd->add_option("--user", eval_user, "Simulated user: rand or rule");
  eval_cmd->add_option("--dialogs", eval_dialogs, "Number of dialogs");
  eval_cmd->add_option("--turn-cap", eval_cap, "Turn cap");
  eval_cmd->add_option("--out", eval_out, "Curve CSV to write (default: stdout)");
  eval_cmd->add_option("--seed", eval_seed, "Evaluation seed");
  eval_cmd->add_option("--corpus", eval_corpus, "Corpus file for rule-based policies");
  eval_cmd->add_option("--exec", eval_exec, "serial or parallel");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "Run a policies x setups x seeds grid");
  std::string exp_config, exp_outdir;
  exp_cmd->add_option("--config", exp_config, "Run configuration")->required();
  exp_cmd->add_option("--outdir", exp_outdir, "Output directory")->required();

  // play
  auto* play_cmd = app.add_subcommand("play", "Play one side of a dialog in the terminal");
  std::string play_policy = "baseline", play_role = "user", play_mode = "RB", play_scenario, play_transcript,
              play_corpus;
  std::uint64_t play_seed = 1;
  int play_cap = 40;
  play_cmd->add_option("--policy", play_policy, "Opponent: checkpoint path, baseline, random or close-only");
  play_cmd->add_option("--role", play_role, "Side you play: user or system");
  play_cmd->add_option("--seed", play_seed, "Scenario and opponent seed");
  play_cmd->add_option("--mode", play_mode, "Belief split for generated scenarios: RB, UB or SB");
  play_cmd->add_option("--scenario", play_scenario, "Scenario file instead of a generated split");
  play_cmd->add_option("--transcript", play_transcript, "Event log to write (default: print at the end)");
  play_cmd->add_option("--corpus", play_corpus, "Corpus file");
  play_cmd->add_option("--turn-cap", play_cap, "Turn cap");

  // check-gradients
  auto* grad_cmd = app.add_subcommand("check-gradients", "Compare analytic and finite-difference gradients");
  int grad_trials = 50;
  std::uint64_t grad_seed = 1;
  double grad_tol = 1e-4;
  std::string grad_corpus;
  grad_cmd->add_option("--trials", grad_trials, "Number of random trials");
  grad_cmd->add_option("--seed", grad_seed, "Seed");
  grad_cmd->add_option("--tolerance", grad_tol, "Largest accepted relative error");
  grad_cmd->add_option("--corpus", grad_corpus, "Corpus file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*train_cmd) {
      RunConfig cfg = usage([&] { return load_config(train_config); });
      Setup setup = train_setup.empty() ? cfg.setup : usage([&] { return parse_setup(train_setup); });
      if (train_seed_set) cfg.train.seed = train_seed;
      const Corpus corpus = load_corpus(cfg.resolved_corpus_path());
      validate_corpus(corpus);
      TrainResult r = train_on_setup(cfg.train, cfg, setup, corpus);
      save_checkpoint(train_out, *r.q, corpus);
      write_text(train_curve.empty() ? train_out + ".learning.csv" : train_curve, format_learning_curve(r.curve));
      if (!r.curve.empty())
        std::printf("trained %s on %s: last epoch return %.3f, success %.3f\n", r.q->model().c_str(),
                    setup.name().c_str(), r.curve.back().mean_return, r.curve.back().success_rate);
      return 0;
    }
    if (*eval_cmd) {
      EvalConfig ec;
      ec.setup = usage([&] { return Setup{parse_split_mode(eval_mode), parse_user_kind(eval_user)}; });
      ec.n_dialogs = eval_dialogs;
      ec.turn_cap = eval_cap;
      ec.seed = eval_seed;
      ec.exec = parse_exec(eval_exec);
      if (eval_dialogs < 1 || eval_cap < 1) throw UsageError("--dialogs and --turn-cap must be >= 1");
      Corpus corpus;
      bool from_ckpt = false;
      auto policy = policy_from(eval_policy, corpus, from_ckpt);
      if (!from_ckpt) corpus = load_corpus(eval_corpus.empty() ? shipped_corpus_path() : eval_corpus);
      const std::string text = format_eval_curve(evaluate(*policy, corpus, ec));
      if (eval_out.empty())
        std::fputs(text.c_str(), stdout);
      else
        write_text(eval_out, text);
      return 0;
    }
    if (*exp_cmd) {
      RunConfig cfg = usage([&] { return load_config(exp_config); });
      auto cells = run_experiment(cfg, exp_outdir, &std::cout);
      std::printf("%zu cells, summary in %s/summary.csv\n", cells.size(), exp_outdir.c_str());
      return 0;
    }
    if (*play_cmd) {
      PlayOptions po;
      if (play_role == "user")
        po.human = Participant::User;
      else if (play_role == "system")
        po.human = Participant::System;
      else
        throw UsageError("--role must be user or system");
      po.seed = play_seed;
      po.turn_cap = play_cap;
      Corpus corpus;
      bool from_ckpt = false;
      auto policy = policy_from(play_policy, corpus, from_ckpt);
      Scenario sc;
      if (!play_scenario.empty()) {
        sc = load_scenario(play_scenario);
      } else {
        if (!from_ckpt) corpus = load_corpus(play_corpus.empty() ? shipped_corpus_path() : play_corpus);
        Rng rng(play_seed);
        sc = generate_scenario(corpus, usage([&] { return parse_split_mode(play_mode); }), rng);
      }
      PlayResult r = play_session(sc, *policy, po, std::cin, std::cout);
      const std::string log = format_transcript(r.transcript);
      if (play_transcript.empty())
        std::cout << "\ntranscript:\n" << log;
      else
        write_text(play_transcript, log);
      return 0;
    }
    if (*grad_cmd) {
      if (grad_trials < 1) throw UsageError("--trials must be >= 1");
      const Corpus corpus = load_corpus(grad_corpus.empty() ? shipped_corpus_path() : grad_corpus);
      GradCheckReport rep = check_gradients(corpus, {grad_trials, grad_seed, 1e-5});
      for (std::size_t i = 0; i < rep.trials.size(); ++i) {
        const auto& t = rep.trials[i];
        std::printf("trial %zu %s max_rel_error %.3e (%s)\n", i, t.model.c_str(), t.max_rel_error,
                    t.worst_block.empty() ? "-" : t.worst_block.c_str());
      }
      const bool ok = rep.max_rel_error() <= grad_tol && rep.full_coverage();
      std::printf("max relative error %.3e over %d trials, coverage %s: %s\n", rep.max_rel_error(), grad_trials,
                  rep.full_coverage() ? "complete" : "incomplete", ok ? "ok" : "FAILED");
      return ok ? 0 : 2;
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
