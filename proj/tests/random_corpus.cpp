#include "random_corpus.hpp"

namespace ids::testing {

namespace {
const char* kPredicates[] = {"P", "Q", "R", "S", "T", "U"};
const char* kConstants[] = {"a", "b", "c", "d", "e"};
const char* kVariables[] = {"X", "Y", "Z"};
}  // namespace

RandomCorpus::RandomCorpus(std::uint64_t seed, RandomCorpusOptions opts)
    : rng_(seed), opts_(opts) {
  for (int p = 0; p < opts_.predicates; ++p) arity_.push_back(1 + index(opts_.max_arity));
}

Atom RandomCorpus::atom_with(int pred, bool ground, double constant_rate,
                             const std::vector<std::string>& vars) {
  Atom a;
  a.predicate = kPredicates[pred];
  a.positive = !coin(opts_.negation_rate);
  for (int i = 0; i < arity_[pred]; ++i) {
    if (ground || coin(constant_rate))
      a.args.push_back(Term::constant(kConstants[index(opts_.constants)]));
    else
      a.args.push_back(Term::variable(vars[index(static_cast<int>(vars.size()))]));
  }
  return a;
}

Atom RandomCorpus::ground_atom() { return atom_with(index(opts_.predicates), true, 1.0, {}); }

Atom RandomCorpus::pattern_atom(double constant_rate) {
  return atom_with(index(opts_.predicates), false, constant_rate, {"X", "Y", "Z"});
}

Belief RandomCorpus::state_belief() {
  std::vector<Atom> atoms{ground_atom()};
  if (coin(0.4)) atoms.push_back(ground_atom());
  return Belief::state(std::move(atoms));
}

Belief RandomCorpus::rule() {
  std::vector<std::string> vars(std::begin(kVariables), std::end(kVariables));
  std::vector<Atom> body;
  int n = 1 + index(opts_.max_body);
  for (int i = 0; i < n; ++i) body.push_back(atom_with(index(opts_.predicates), false, 0.2, vars));
  // Head variables come from the body, except for an occasional fresh one
  // that forces a skolem constant.
  auto body_vars = variables_of(body);
  if (body_vars.empty()) body_vars.push_back("X");
  std::vector<std::string> head_vars = body_vars;
  if (coin(opts_.skolem_rate)) head_vars = {"W"};
  Atom head = atom_with(index(opts_.predicates), false, 0.1, head_vars);
  return Belief::rule(std::move(body), std::move(head));
}

BeliefSet RandomCorpus::belief_set(int n) {
  BeliefSet bs;
  int guard = 0;
  while (static_cast<int>(bs.size()) < n && guard++ < 100) bs.insert(coin(0.55) ? state_belief() : rule());
  return bs;
}

std::vector<Atom> RandomCorpus::targets(int max_atoms) {
  std::vector<Atom> out;
  int n = 1 + index(max_atoms);
  for (int i = 0; i < n; ++i) out.push_back(pattern_atom(0.25));
  return out;
}

}  // namespace ids::testing
