#include "ids/config.hpp"

#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "ids/corpus.hpp"

#ifndef IDS_DATA_DIR
#define IDS_DATA_DIR "data"
#endif

namespace ids {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

long long to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
  long long x = to_int(key, v);
  if (x < 0) throw ConfigError(key + ": seeds are non-negative");
  return static_cast<std::uint64_t>(x);
}

Exec to_exec(const std::string& key, const std::string& v) {
  if (v == "serial") return Exec::Serial;
  if (v == "parallel") return Exec::Parallel;
  throw ConfigError(key + ": expected serial or parallel");
}

const char* exec_name(Exec e) { return e == Exec::Serial ? "serial" : "parallel"; }

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class F>
auto wrap(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto int_field = [&](const char* name, int TrainConfig::*field) {
      t[name] = [field](RunConfig& c, const std::string& k, const std::string& v) {
        c.train.*field = static_cast<int>(to_int(k, v));
      };
    };
    int_field("epochs", &TrainConfig::epochs);
    int_field("dialogs_per_epoch", &TrainConfig::dialogs_per_epoch);
    int_field("eps_anneal_epochs", &TrainConfig::eps_anneal_epochs);
    int_field("buffer_capacity", &TrainConfig::buffer_capacity);
    int_field("batch_size", &TrainConfig::batch_size);
    int_field("target_sync_episodes", &TrainConfig::target_sync_episodes);
    int_field("train_steps_per_episode", &TrainConfig::train_steps_per_episode);
    int_field("turn_cap", &TrainConfig::turn_cap);
    int_field("d", &TrainConfig::d);
    int_field("d_lin", &TrainConfig::d_lin);
    int_field("hidden", &TrainConfig::hidden);
    t["eps_start"] = [](RunConfig& c, auto& k, auto& v) { c.train.eps_start = to_double(k, v); };
    t["eps_end"] = [](RunConfig& c, auto& k, auto& v) { c.train.eps_end = to_double(k, v); };
    t["learning_rate"] = [](RunConfig& c, auto& k, auto& v) { c.train.learning_rate = to_double(k, v); };
    t["encoder"] = [](RunConfig& c, auto& k, auto& v) { c.train.encoder = wrap(k, [&] { return parse_encoder(v); }); };
    t["seed"] = [](RunConfig& c, auto& k, auto& v) { c.train.seed = to_seed(k, v); };
    t["exec"] = [](RunConfig& c, auto& k, auto& v) { c.train.exec = to_exec(k, v); };
    t["w_pos"] = [](RunConfig& c, auto& k, auto& v) { c.reward.w_pos = to_double(k, v); };
    t["w_neg"] = [](RunConfig& c, auto& k, auto& v) { c.reward.w_neg = to_double(k, v); };
    t["gamma"] = [](RunConfig& c, auto& k, auto& v) { c.reward.gamma = to_double(k, v); };
    t["user_p"] = [](RunConfig& c, auto& k, auto& v) { c.user_p = to_double(k, v); };
    t["corpus"] = [](RunConfig& c, auto&, auto& v) { c.corpus_path = v; };
    t["setup"] = [](RunConfig& c, auto& k, auto& v) { c.setup = wrap(k, [&] { return parse_setup(v); }); };
    t["policies"] = [](RunConfig& c, auto&, auto& v) { c.policies = split_list(v); };
    t["setups"] = [](RunConfig& c, auto& k, auto& v) {
      c.setups.clear();
      for (const auto& s : split_list(v)) c.setups.push_back(wrap(k, [&] { return parse_setup(s); }));
    };
    t["seeds"] = [](RunConfig& c, auto& k, auto& v) {
      c.seeds.clear();
      for (const auto& s : split_list(v)) c.seeds.push_back(to_seed(k, s));
    };
    t["eval_dialogs"] = [](RunConfig& c, auto& k, auto& v) { c.eval_dialogs = static_cast<int>(to_int(k, v)); };
    t["eval_turn_cap"] = [](RunConfig& c, auto& k, auto& v) { c.eval_turn_cap = static_cast<int>(to_int(k, v)); };
    t["eval_seed"] = [](RunConfig& c, auto& k, auto& v) { c.eval_seed = to_seed(k, v); };
    t["eval_exec"] = [](RunConfig& c, auto& k, auto& v) { c.eval_exec = to_exec(k, v); };
    return t;
  }();
  return table;
}

}  // namespace

std::string shipped_corpus_path() { return std::string(IDS_DATA_DIR) + "/compliance.txt"; }

SimulatorConfig RunConfig::simulator(const Setup& s) const {
  return user_p ? SimulatorConfig{*user_p} : simulator_for(s.user);
}

std::string RunConfig::resolved_corpus_path() const {
  return corpus_path.empty() ? shipped_corpus_path() : corpus_path;
}

void RunConfig::validate() const {
  wrap("train", [&] { train.validate(); return 0; });
  wrap("reward", [&] { reward.validate(); return 0; });
  if (user_p) wrap("user_p", [&] { SimulatorConfig{*user_p}.validate(); return 0; });
  if (policies.empty()) throw ConfigError("policies: at least one policy is required");
  if (setups.empty()) throw ConfigError("setups: at least one setup is required");
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  if (eval_dialogs < 1 || eval_turn_cap < 1) throw ConfigError("eval_dialogs and eval_turn_cap must be >= 1");
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    it->second(c, key, value);
  }
  if (!c.corpus_path.empty() && !base_dir.empty() && std::filesystem::path(c.corpus_path).is_relative())
    c.corpus_path = (std::filesystem::path(base_dir) / c.corpus_path).lexically_normal().string();
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  const std::string text = read_text_file(path);
  return parse_config(text, std::filesystem::path(path).parent_path().string());
}

std::string format_config(const RunConfig& c) {
  std::string out;
  auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  auto join = [](const auto& items, auto f) {
    std::string s;
    for (const auto& x : items) s += (s.empty() ? "" : ", ") + f(x);
    return s;
  };
  const TrainConfig& t = c.train;
  if (!c.corpus_path.empty()) kv("corpus", c.corpus_path);
  kv("epochs", std::to_string(t.epochs));
  kv("dialogs_per_epoch", std::to_string(t.dialogs_per_epoch));
  kv("eps_start", num(t.eps_start));
  kv("eps_end", num(t.eps_end));
  kv("eps_anneal_epochs", std::to_string(t.eps_anneal_epochs));
  kv("buffer_capacity", std::to_string(t.buffer_capacity));
  kv("batch_size", std::to_string(t.batch_size));
  kv("learning_rate", num(t.learning_rate));
  kv("target_sync_episodes", std::to_string(t.target_sync_episodes));
  kv("train_steps_per_episode", std::to_string(t.train_steps_per_episode));
  kv("turn_cap", std::to_string(t.turn_cap));
  kv("encoder", to_string(t.encoder));
  kv("d", std::to_string(t.d));
  kv("d_lin", std::to_string(t.d_lin));
  kv("hidden", std::to_string(t.hidden));
  kv("seed", std::to_string(t.seed));
  kv("exec", exec_name(t.exec));
  kv("w_pos", num(c.reward.w_pos));
  kv("w_neg", num(c.reward.w_neg));
  kv("gamma", num(c.reward.gamma));
  if (c.user_p) kv("user_p", num(*c.user_p));
  kv("setup", c.setup.name());
  kv("policies", join(c.policies, [](const std::string& s) { return s; }));
  kv("setups", join(c.setups, [](const Setup& s) { return s.name(); }));
  kv("seeds", join(c.seeds, [](std::uint64_t s) { return std::to_string(s); }));
  kv("eval_dialogs", std::to_string(c.eval_dialogs));
  kv("eval_turn_cap", std::to_string(c.eval_turn_cap));
  kv("eval_seed", std::to_string(c.eval_seed));
  kv("eval_exec", exec_name(c.eval_exec));
  return out;
}

}  // namespace ids
