#include "ids/inference.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cstdio>
#include <stdexcept>
#include <utility>

namespace ids {

BeliefSet::BeliefSet(std::initializer_list<Belief> beliefs) {
  for (const auto& b : beliefs) insert(b);
}

BeliefSet::BeliefSet(const std::vector<Belief>& beliefs) {
  for (const auto& b : beliefs) insert(b);
}

bool BeliefSet::insert(const Belief& b) { return items_.insert(canonicalize(b)).second; }

bool BeliefSet::contains(const Belief& b) const { return items_.contains(canonicalize(b)); }

void BeliefSet::merge(const BeliefSet& other) { items_.insert(other.begin(), other.end()); }

bool BeliefSet::is_subset_of(const BeliefSet& other) const {
  return std::includes(other.items_.begin(), other.items_.end(), items_.begin(), items_.end());
}

BeliefSet BeliefSet::united(const BeliefSet& other) const {
  BeliefSet out = *this;
  out.merge(other);
  return out;
}

std::string to_string(const BeliefSet& bs) {
  std::string out = "{";
  bool first = true;
  for (const auto& b : bs) {
    if (!first) out += "; ";
    first = false;
    out += to_string(b);
  }
  return out + "}";
}

std::string to_string(const Argument& arg) {
  return to_string(arg.support) + " |- " + to_string(arg.claim);
}

// ---------------------------------------------------------------------------
// Skolem constants

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

std::string skolem_constant(const Belief& canonical_rule, const std::string& var,
                            const Substitution& body_bindings) {
  std::string key = to_string(canonical_rule) + "|" + var + "|";
  for (const auto& v : variables_of(canonical_rule.antecedent))
    key += v + "=" + body_bindings.resolve(Term::variable(v)).name + ";";
  char buf[20];
  std::snprintf(buf, sizeof buf, "sk_%012llx",
                static_cast<unsigned long long>(fnv1a(key) & 0xffffffffffffull));
  return buf;
}

bool is_skolem_constant(const std::string& name) {
  if (name.size() != 15 || name.compare(0, 3, "sk_") != 0) return false;
  return std::all_of(name.begin() + 3, name.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)) || (c >= 'a' && c <= 'f'); });
}

std::optional<Atom> instantiate_head(const Belief& rule, const Substitution& body_bindings) {
  Atom head = apply(body_bindings, rule.head());
  bool needs_fresh = false;
  for (const auto& t : head.args) needs_fresh = needs_fresh || t.is_variable();
  if (needs_fresh) {
    for (const auto& v : variables_of(rule.antecedent))
      if (is_skolem_constant(body_bindings.resolve(Term::variable(v)).name)) return std::nullopt;
  }
  for (std::size_t i = 0; i < head.args.size(); ++i)
    if (head.args[i].is_variable())
      head.args[i] = Term::constant(skolem_constant(rule, rule.head().args[i].name, body_bindings));
  return head;
}

// ---------------------------------------------------------------------------
// Closure

namespace {

using FactIndex = std::map<std::pair<bool, std::string>, std::vector<const Atom*>>;

FactIndex index_facts(const std::map<Atom, std::vector<Justification>>& atoms) {
  FactIndex idx;
  for (const auto& [a, _] : atoms) idx[{a.positive, a.predicate}].push_back(&a);
  return idx;
}

// Enumerates every substitution matching `body` against indexed ground facts.
template <class F>
void match_body(const std::vector<Atom>& body, std::size_t i, const Substitution& s,
                std::vector<Atom>& premises, const FactIndex& facts, F&& on_match) {
  if (i == body.size()) {
    on_match(s, premises);
    return;
  }
  auto it = facts.find({body[i].positive, body[i].predicate});
  if (it == facts.end()) return;
  for (const Atom* fact : it->second) {
    auto next = unify(body[i], *fact, s);
    if (!next) continue;
    premises.push_back(*fact);
    match_body(body, i + 1, *next, premises, facts, on_match);
    premises.pop_back();
  }
}

}  // namespace

Closure::Closure(const BeliefSet& bs) : beliefs_(bs.to_vector()) {
  if (beliefs_.size() > 64) throw std::length_error("belief sets are limited to 64 beliefs");
  for (std::size_t i = 0; i < beliefs_.size(); ++i)
    if (beliefs_[i].is_state())
      for (const auto& a : beliefs_[i].atoms()) atoms_[a].push_back({i, {}});

  std::vector<std::size_t> rules;
  for (std::size_t i = 0; i < beliefs_.size(); ++i)
    if (beliefs_[i].is_domain()) rules.push_back(i);

  // Naive fixpoint iteration. Terminates: skolem constants are built only
  // from non-skolem constants, so the constant universe is finite.
  for (;;) {
    FactIndex facts = index_facts(atoms_);
    std::set<Atom> fresh;
    std::vector<Atom> premises;
    for (std::size_t r : rules) {
      match_body(beliefs_[r].antecedent, 0, {}, premises, facts,
                 [&](const Substitution& s, const std::vector<Atom>&) {
                   auto head = instantiate_head(beliefs_[r], s);
                   if (head && !atoms_.contains(*head)) fresh.insert(std::move(*head));
                 });
    }
    if (fresh.empty()) break;
    for (auto& a : fresh) atoms_[a];
  }

  FactIndex facts = index_facts(atoms_);
  std::vector<Atom> premises;
  for (std::size_t r : rules) {
    match_body(beliefs_[r].antecedent, 0, {}, premises, facts,
               [&](const Substitution& s, const std::vector<Atom>& prem) {
                 if (auto head = instantiate_head(beliefs_[r], s))
                   atoms_[*head].push_back({r, prem});
               });
  }
}

bool Closure::consistent() const {
  for (const auto& [a, _] : atoms_)
    if (a.positive && atoms_.contains(a.negated())) return false;
  return true;
}

std::vector<Atom> Closure::ground_atoms() const {
  std::vector<Atom> out;
  out.reserve(atoms_.size());
  for (const auto& [a, _] : atoms_) out.push_back(a);
  return out;
}

BeliefSet Closure::subset(Mask m) const {
  BeliefSet out;
  for (std::size_t i = 0; i < beliefs_.size(); ++i)
    if (m >> i & 1u) out.insert(beliefs_[i]);
  return out;
}

std::vector<Mask> minimize(std::vector<Mask> masks) {
  std::sort(masks.begin(), masks.end(), [](Mask a, Mask b) {
    int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
  std::vector<Mask> kept;
  for (Mask m : masks) {
    bool dominated = false;
    for (Mask k : kept)
      if ((k & m) == k) {
        dominated = true;
        break;
      }
    if (!dominated) kept.push_back(m);
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

namespace {

std::vector<Mask> cross_union(const std::vector<Mask>& lhs, const std::vector<Mask>& rhs) {
  std::vector<Mask> out;
  out.reserve(lhs.size() * rhs.size());
  for (Mask a : lhs)
    for (Mask b : rhs) out.push_back(a | b);
  return minimize(std::move(out));
}

}  // namespace

void Closure::compute_supports() const {
  for (const auto& [a, _] : atoms_) supports_[a];
  // Label propagation to a fixpoint. Each pass only enlarges the upward
  // closure of every label, so it terminates.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& [atom, justs] : atoms_) {
      std::vector<Mask> label;
      for (const auto& j : justs) {
        std::vector<Mask> envs{Mask{1} << j.belief};
        for (const auto& p : j.premises) {
          envs = cross_union(envs, supports_.at(p));
          if (envs.empty()) break;
        }
        label.insert(label.end(), envs.begin(), envs.end());
      }
      label = minimize(std::move(label));
      auto& slot = supports_.at(atom);
      if (label != slot) {
        slot = std::move(label);
        changed = true;
      }
    }
  }
  supports_ready_ = true;
}

const std::vector<Mask>& Closure::supports(const Atom& a) const {
  static const std::vector<Mask> none;
  if (!supports_ready_) compute_supports();
  auto it = supports_.find(a);
  return it == supports_.end() ? none : it->second;
}

// ---------------------------------------------------------------------------
// Queries over belief sets

std::set<Atom> closure(const BeliefSet& bs) {
  Closure c(bs);
  const auto atoms = c.ground_atoms();
  return {atoms.begin(), atoms.end()};
}

bool derives(const BeliefSet& bs, const std::vector<Atom>& claim) {
  Closure c(bs);
  return std::all_of(claim.begin(), claim.end(), [&](const Atom& a) { return c.contains(a); });
}

bool is_consistent(const BeliefSet& bs) { return Closure(bs).consistent(); }

namespace {

std::vector<Mask> claim_supports(const Closure& c, const std::vector<Atom>& claim) {
  std::vector<Mask> envs{0};
  for (const auto& a : claim) {
    envs = cross_union(envs, c.supports(a));
    if (envs.empty()) break;
  }
  return envs;
}

}  // namespace

std::vector<BeliefSet> minimal_supports(const BeliefSet& bs, const std::vector<Atom>& claim) {
  Closure c(bs);
  const bool all_consistent = c.consistent();
  std::vector<BeliefSet> out;
  for (Mask m : claim_supports(c, claim)) {
    BeliefSet s = c.subset(m);
    if (all_consistent || is_consistent(s)) out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void extend_claims(const std::vector<Atom>& targets, std::size_t i, const Substitution& s,
                   std::vector<Atom>& chosen, const FactIndex& facts,
                   std::set<std::vector<Atom>>& out) {
  if (i == targets.size()) {
    if (!chosen.empty()) out.insert(chosen);
    return;
  }
  extend_claims(targets, i + 1, s, chosen, facts, out);
  auto it = facts.find({targets[i].positive, targets[i].predicate});
  if (it == facts.end()) return;
  for (const Atom* fact : it->second) {
    if (std::find(chosen.begin(), chosen.end(), *fact) != chosen.end()) continue;
    auto next = unify(targets[i], *fact, s);
    if (!next) continue;
    chosen.push_back(*fact);
    extend_claims(targets, i + 1, *next, chosen, facts, out);
    chosen.pop_back();
  }
}

}  // namespace

std::vector<std::vector<Atom>> candidate_claims(const Closure& closure,
                                                const std::vector<Atom>& targets) {
  FactIndex facts = index_facts(closure.atoms());
  std::set<std::vector<Atom>> out;
  std::vector<Atom> chosen;
  extend_claims(targets, 0, {}, chosen, facts, out);
  return {out.begin(), out.end()};
}

std::vector<Argument> find_arguments(const BeliefSet& bs, const std::vector<Atom>& targets,
                                     const std::set<Argument>& excluded) {
  Closure c(bs);
  const bool all_consistent = c.consistent();
  std::vector<std::pair<std::string, Argument>> found;
  for (const auto& claim : candidate_claims(c, targets)) {
    for (Mask m : claim_supports(c, claim)) {
      Argument arg{c.subset(m), claim};
      if (!all_consistent && !is_consistent(arg.support)) continue;
      if (excluded.contains(arg)) continue;
      auto key = to_string(arg);
      found.emplace_back(std::move(key), std::move(arg));
    }
  }
  std::sort(found.begin(), found.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Argument> out;
  out.reserve(found.size());
  for (auto& [_, arg] : found) out.push_back(std::move(arg));
  return out;
}

}  // namespace ids
