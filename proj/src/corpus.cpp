#include "ids/corpus.hpp"

#include <fstream>
#include <sstream>

namespace ids {

std::vector<Belief> Corpus::beliefs() const {
  std::vector<Belief> out = domain;
  out.insert(out.end(), state.begin(), state.end());
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Corpus parse_corpus(std::string_view text, const ParseOptions& opts) {
  Corpus c;
  bool have_query = false;
  BeliefSet seen;
  for (auto& f : parse_belief_file(text, opts)) {
    if (auto* q = std::get_if<Query>(&f)) {
      if (have_query) throw CorpusError("corpus has more than one query");
      c.query = canonicalize(*q);
      have_query = true;
      continue;
    }
    Belief b = canonicalize(std::get<Belief>(f));
    if (!seen.insert(b)) throw CorpusError("duplicate belief: " + to_string(b));
    (b.is_domain() ? c.domain : c.state).push_back(b);
  }
  if (!have_query) throw CorpusError("corpus has no query line");
  return c;
}

Corpus load_corpus(const std::string& path, const ParseOptions& opts) {
  return parse_corpus(read_text_file(path), opts);
}

std::string format_corpus(const Corpus& c) {
  std::string out;
  for (const auto& b : c.beliefs()) out += to_string(b) + "\n";
  out += to_string(c.query) + "\n";
  return out;
}

bool corpus_answerable(const Corpus& c) {
  for (const auto& arg : find_arguments(c.all(), c.query.atoms))
    if (arg.claim.size() == c.query.atoms.size()) return true;
  return false;
}

void validate_corpus(const Corpus& c) {
  if (!is_consistent(c.all())) throw CorpusError("corpus is inconsistent");
  if (!corpus_answerable(c)) throw CorpusError("corpus does not derive an answer to its query");
}

const char* to_string(SplitMode m) {
  switch (m) {
    case SplitMode::RB: return "RB";
    case SplitMode::UB: return "UB";
    case SplitMode::SB: return "SB";
  }
  return "?";
}

SplitMode parse_split_mode(const std::string& s) {
  if (s == "RB") return SplitMode::RB;
  if (s == "UB") return SplitMode::UB;
  if (s == "SB") return SplitMode::SB;
  throw std::invalid_argument("unknown split mode '" + s + "' (expected RB, UB or SB)");
}

Scenario generate_scenario(const Corpus& corpus, SplitMode mode, Rng& rng) {
  Scenario s;
  s.query = corpus.query;
  s.mode = mode;
  for (const auto& b : corpus.state) (rng.bernoulli(0.5) ? s.sigma_sys : s.sigma_usr).insert(b);
  for (const auto& b : corpus.domain) {
    switch (mode) {
      case SplitMode::RB: (rng.bernoulli(0.5) ? s.sigma_sys : s.sigma_usr).insert(b); break;
      case SplitMode::UB: s.sigma_usr.insert(b); break;
      case SplitMode::SB: s.sigma_sys.insert(b); break;
    }
  }
  return s;
}

Scenario parse_scenario(std::string_view text, const ParseOptions& opts) {
  Scenario s;
  enum { None, System, User, QuerySection } section = None;
  bool have_query = false;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);
    if (line == "[system]") { section = System; continue; }
    if (line == "[user]") { section = User; continue; }
    if (line == "[query]") { section = QuerySection; continue; }
    Formula f = parse_formula(line, opts, line_no);
    switch (section) {
      case None: throw CorpusError("line " + std::to_string(line_no) + ": formula outside a section");
      case System:
      case User:
        if (!std::holds_alternative<Belief>(f))
          throw CorpusError("line " + std::to_string(line_no) + ": query in a belief section");
        (section == System ? s.sigma_sys : s.sigma_usr).insert(std::get<Belief>(f));
        break;
      case QuerySection:
        if (!std::holds_alternative<Query>(f) || have_query)
          throw CorpusError("line " + std::to_string(line_no) + ": expected a single query");
        s.query = canonicalize(std::get<Query>(f));
        have_query = true;
        break;
    }
  }
  if (!have_query) throw CorpusError("scenario has no [query] section");
  return s;
}

Scenario load_scenario(const std::string& path, const ParseOptions& opts) {
  return parse_scenario(read_text_file(path), opts);
}

}  // namespace ids
