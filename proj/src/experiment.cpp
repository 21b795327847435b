#include "ids/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace ids {

PolicySpec parse_policy_spec(const std::string& s) {
  PolicySpec p;
  p.name = s;
  if (s == "baseline") return p;
  if (s == "random") {
    p.kind = PolicySpec::Kind::Random;
    return p;
  }
  if (s == "close-only") {
    p.kind = PolicySpec::Kind::CloseOnly;
    return p;
  }
  if (s == "dqlwoe") {
    p.kind = PolicySpec::Kind::BagMlp;
    return p;
  }
  if (s.rfind("dqlwe-", 0) == 0 && s.size() > 7 && s.back() == 'd') {
    const std::string digits = s.substr(6, s.size() - 7);
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit) && digits.size() < 4) {
      p.kind = PolicySpec::Kind::Embedded;
      p.d = std::stoi(digits);
      if (p.d >= 1) return p;
    }
  }
  if (s.rfind("checkpoint:", 0) == 0 && s.size() > 11) {
    p.kind = PolicySpec::Kind::Checkpoint;
    p.path = s.substr(11);
    p.name = fs::path(p.path).stem().string();
    return p;
  }
  throw ConfigError("unknown policy '" + s + "' (expected baseline, random, close-only, dqlwoe, dqlwe-<d>d or checkpoint:<path>)");
}

TrainConfig train_config_for(const RunConfig& cfg, const PolicySpec& p, std::uint64_t seed) {
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  if (p.kind == PolicySpec::Kind::Embedded) {
    tc.encoder = Encoder::Embedded;
    tc.d = p.d;
  } else if (p.kind == PolicySpec::Kind::BagMlp) {
    tc.encoder = Encoder::BagMlp;
  }
  return tc;
}

TrainResult train_on_setup(const TrainConfig& tc, const RunConfig& cfg, const Setup& setup, const Corpus& corpus) {
  auto index = std::make_shared<const CorpusIndex>(corpus);
  return train(tc, cfg.reward, cfg.simulator(setup), index,
               [&corpus, mode = setup.mode](Rng& rng) { return generate_scenario(corpus, mode, rng); });
}

std::uint64_t eval_seed_for(const RunConfig& cfg, std::uint64_t seed) { return stream_seed(cfg.eval_seed, seed); }

std::string cell_stem(const std::string& policy, const Setup& setup, std::uint64_t seed) {
  return policy + "__" + setup.name() + "__s" + std::to_string(seed);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << content;
    if (!f.flush()) throw std::runtime_error("failed writing " + tmp);
  }
  fs::rename(tmp, path);
}

namespace {

std::unique_ptr<Policy> fixed_policy(const PolicySpec& p) {
  switch (p.kind) {
    case PolicySpec::Kind::Baseline: return std::make_unique<BaselinePolicy>();
    case PolicySpec::Kind::Random: return std::make_unique<RandomPolicy>();
    case PolicySpec::Kind::CloseOnly: return std::make_unique<CloseOnlyPolicy>();
    default: return nullptr;
  }
}

}  // namespace

std::vector<CellResult> run_experiment(const RunConfig& cfg, const std::string& outdir, std::ostream* log) {
  cfg.validate();
  std::vector<PolicySpec> specs;
  for (const auto& s : cfg.policies) specs.push_back(parse_policy_spec(s));
  const Corpus corpus = load_corpus(cfg.resolved_corpus_path());
  validate_corpus(corpus);
  fs::create_directories(outdir);

  std::vector<CellResult> cells;
  for (const auto& spec : specs) {
    std::shared_ptr<const QFunction> loaded;
    if (spec.kind == PolicySpec::Kind::Checkpoint) {
      if (!fs::exists(spec.path)) throw CheckpointError("missing checkpoint " + spec.path);
      LoadedModel m = load_checkpoint(spec.path);
      if (!(m.corpus == corpus)) throw CheckpointError("checkpoint " + spec.path + " was trained on a different corpus");
      loaded = m.q;
    }
    for (const auto& setup : cfg.setups) {
      for (std::uint64_t seed : cfg.seeds) {
        CellResult cell;
        cell.policy = spec.name;
        cell.setup = setup;
        cell.seed = seed;
        const std::string stem = (fs::path(outdir) / cell_stem(spec.name, setup, seed)).string();
        const std::string csv = stem + ".csv";
        if (fs::exists(csv)) {
          cell.curve = parse_eval_curve(read_text_file(csv));
          cell.reused = true;
          if (log) *log << "reuse " << csv << "\n";
          cells.push_back(std::move(cell));
          continue;
        }

        std::unique_ptr<Policy> policy = fixed_policy(spec);
        if (!policy) {
          std::shared_ptr<const QFunction> q = loaded;
          if (spec.trained()) {
            const std::string ckpt = stem + ".ckpt";
            if (fs::exists(ckpt)) {
              q = load_checkpoint(ckpt).q;
              if (log) *log << "reuse " << ckpt << "\n";
            } else {
              if (log) *log << "train " << spec.name << " " << setup.name() << " seed " << seed << "\n" << std::flush;
              TrainResult r = train_on_setup(train_config_for(cfg, spec, seed), cfg, setup, corpus);
              write_file_atomic(stem + ".learning.csv", format_learning_curve(r.curve));
              write_file_atomic(ckpt, format_checkpoint(*r.q, corpus));
              q = std::move(r.q);
            }
          }
          policy = std::make_unique<GreedyQPolicy>(q, spec.name);
        }

        EvalConfig ec;
        ec.setup = setup;
        ec.n_dialogs = cfg.eval_dialogs;
        ec.turn_cap = cfg.eval_turn_cap;
        ec.seed = eval_seed_for(cfg, seed);
        ec.exec = cfg.eval_exec;
        cell.curve = evaluate(*policy, corpus, ec);
        cell.curve.seed = seed;
        write_file_atomic(csv, format_eval_curve(cell.curve));
        if (log) *log << "wrote " << csv << "\n" << std::flush;
        cells.push_back(std::move(cell));
      }
    }
  }
  write_file_atomic((fs::path(outdir) / "summary.csv").string(), format_summary(cells));
  return cells;
}

std::string format_summary(const std::vector<CellResult>& cells) {
  std::string out = "policy,setup,seed,sr_t5,sr_t10,sr_t15,sr_t20,sr_final\n";
  char buf[64];
  for (const auto& c : cells) {
    out += c.policy + "," + c.setup.name() + "," + std::to_string(c.seed);
    const auto& sr = c.curve.success_rate;
    for (int t : {5, 10, 15, 20}) {
      const double v = sr.empty() ? 0.0 : sr[std::min<std::size_t>(t, sr.size()) - 1];
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out += buf;
    }
    std::snprintf(buf, sizeof buf, ",%.6f\n", sr.empty() ? 0.0 : sr.back());
    out += buf;
  }
  return out;
}

double median_success(const std::vector<CellResult>& cells, const std::string& policy, const Setup& setup, int turn) {
  std::vector<double> v;
  for (const auto& c : cells)
    if (c.policy == policy && c.setup == setup) v.push_back(c.curve.at(turn));
  if (v.empty()) throw std::invalid_argument("no cells for " + policy + " " + setup.name());
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace ids
