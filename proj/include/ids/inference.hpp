#pragma once

// Forward chaining, consistency and argument (minimal consistent support)
// computation over sets of beliefs.

#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ids/logic.hpp"

namespace ids {

/// Duplicate-free set of canonical beliefs. Insertion canonicalizes, so
/// alpha-equivalent rules collapse to one element.
class BeliefSet {
 public:
  using const_iterator = std::set<Belief>::const_iterator;

  BeliefSet() = default;
  BeliefSet(std::initializer_list<Belief> beliefs);
  explicit BeliefSet(const std::vector<Belief>& beliefs);

  bool insert(const Belief& b);
  bool contains(const Belief& b) const;
  void merge(const BeliefSet& other);

  std::size_t size() const { return items_.size(); }
  bool empty() const { return items_.empty(); }
  const_iterator begin() const { return items_.begin(); }
  const_iterator end() const { return items_.end(); }

  bool is_subset_of(const BeliefSet& other) const;
  BeliefSet united(const BeliefSet& other) const;
  std::vector<Belief> to_vector() const { return {items_.begin(), items_.end()}; }

  friend auto operator<=>(const BeliefSet&, const BeliefSet&) = default;
  friend bool operator==(const BeliefSet&, const BeliefSet&) = default;

 private:
  std::set<Belief> items_;
};

std::string to_string(const BeliefSet& bs);

/// (support, claim): the support derives the ground conjunction `claim`, is
/// consistent, and no proper subset of it derives the claim.
struct Argument {
  BeliefSet support;
  std::vector<Atom> claim;

  friend auto operator<=>(const Argument&, const Argument&) = default;
  friend bool operator==(const Argument&, const Argument&) = default;
};

std::string to_string(const Argument& arg);

/// Constant instantiating a rule variable that occurs only in the
/// consequent. Determined by the canonical rule, the variable and the
/// bindings of the body variables, so every belief set that fires the same
/// rule instance names the same constant.
std::string skolem_constant(const Belief& canonical_rule, const std::string& var,
                            const Substitution& body_bindings);

/// Skolem constants are spelled `sk_` followed by 12 hex digits.
bool is_skolem_constant(const std::string& name);

/// Ground consequent of `rule` under `body_bindings`, with skolem constants
/// for the consequent-only variables. `rule` must be canonical. Skolem
/// constants do not nest: an instance whose body binds a skolem constant
/// and whose head needs a fresh one does not fire (nullopt). This keeps the
/// closure finite for recursive rules.
std::optional<Atom> instantiate_head(const Belief& rule, const Substitution& body_bindings);

using Mask = std::uint64_t;

struct Justification {
  std::size_t belief;           // index into Closure::beliefs()
  std::vector<Atom> premises;   // empty when `belief` is a state belief stating the atom
};

/// Least fixpoint of a belief set under its rules, with every way each atom
/// was obtained.
class Closure {
 public:
  explicit Closure(const BeliefSet& bs);

  const std::vector<Belief>& beliefs() const { return beliefs_; }
  const std::map<Atom, std::vector<Justification>>& atoms() const { return atoms_; }
  bool contains(const Atom& a) const { return atoms_.contains(a); }
  bool consistent() const;
  std::vector<Atom> ground_atoms() const;

  /// Subset-minimal sets of beliefs (bitmasks over beliefs()) deriving `a`;
  /// empty if `a` is not derivable.
  const std::vector<Mask>& supports(const Atom& a) const;

  BeliefSet subset(Mask m) const;

 private:
  void compute_supports() const;

  std::vector<Belief> beliefs_;
  std::map<Atom, std::vector<Justification>> atoms_;
  mutable bool supports_ready_ = false;
  mutable std::map<Atom, std::vector<Mask>> supports_;
};

/// Removes non-minimal masks (supersets of other masks); result sorted.
std::vector<Mask> minimize(std::vector<Mask> masks);

std::set<Atom> closure(const BeliefSet& bs);
bool derives(const BeliefSet& bs, const std::vector<Atom>& claim);
bool is_consistent(const BeliefSet& bs);

/// Every subset of `bs` that derives `claim`, is consistent and is minimal.
std::vector<BeliefSet> minimal_supports(const BeliefSet& bs, const std::vector<Atom>& claim);

/// All arguments over `bs` whose claim matches the atoms of `targets`: each
/// claim atom is a derivable ground instance of a distinct target atom, all
/// under one substitution. Results exclude `excluded` and are ordered by
/// their printed form.
std::vector<Argument> find_arguments(const BeliefSet& bs, const std::vector<Atom>& targets,
                                     const std::set<Argument>& excluded = {});

/// Ground claims derivable from `closure` that match `targets` as above.
std::vector<std::vector<Atom>> candidate_claims(const Closure& closure,
                                                const std::vector<Atom>& targets);

}  // namespace ids
