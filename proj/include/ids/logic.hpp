#pragma once

// First-order formulas used as beliefs, queries and claims: terms, atoms,
// the two belief shapes, queries, substitutions, a line-oriented parser and
// its printer.

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ids {

struct Term {
  enum class Kind { Variable, Constant };

  Kind kind = Kind::Constant;
  std::string name;

  static Term variable(std::string name) { return {Kind::Variable, std::move(name)}; }
  static Term constant(std::string name) { return {Kind::Constant, std::move(name)}; }

  bool is_variable() const { return kind == Kind::Variable; }

  friend auto operator<=>(const Term&, const Term&) = default;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Atom {
  bool positive = true;
  std::string predicate;
  std::vector<Term> args;

  bool is_ground() const;
  Atom negated() const;

  friend auto operator<=>(const Atom&, const Atom&) = default;
  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class BeliefKind { State, Domain };

/// A state belief is a ground conjunction held in `antecedent`; a domain
/// belief is a rule `antecedent -> consequent[0]`.
struct Belief {
  BeliefKind kind = BeliefKind::State;
  std::vector<Atom> antecedent;
  std::vector<Atom> consequent;

  static Belief state(std::vector<Atom> atoms);
  static Belief rule(std::vector<Atom> antecedent, Atom consequent);

  bool is_state() const { return kind == BeliefKind::State; }
  bool is_domain() const { return kind == BeliefKind::Domain; }
  /// Atoms asserted by a state belief.
  const std::vector<Atom>& atoms() const { return antecedent; }
  const Atom& head() const { return consequent.front(); }

  friend auto operator<=>(const Belief&, const Belief&) = default;
  friend bool operator==(const Belief&, const Belief&) = default;
};

struct Query {
  std::vector<Atom> atoms;

  friend auto operator<=>(const Query&, const Query&) = default;
  friend bool operator==(const Query&, const Query&) = default;
};

using Formula = std::variant<Belief, Query>;

/// Variable bindings. A variable may be bound to a constant or to another
/// variable; `resolve` follows such chains to their representative.
class Substitution {
 public:
  Substitution() = default;

  Term resolve(const Term& t) const;
  /// Binds `var` (a variable name) to `value`. Returns false and leaves the
  /// substitution unchanged if the binding conflicts with an existing one.
  bool bind(const std::string& var, const Term& value);
  bool contains(const std::string& var) const { return bindings_.contains(var); }
  bool empty() const { return bindings_.empty(); }
  std::size_t size() const { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const { return bindings_; }

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  std::map<std::string, Term> bindings_;
};

std::optional<Substitution> unify(const Atom& a, const Atom& b, const Substitution& s = {});

Term apply(const Substitution& s, const Term& t);
Atom apply(const Substitution& s, const Atom& a);
std::vector<Atom> apply(const Substitution& s, const std::vector<Atom>& atoms);
Belief apply(const Substitution& s, const Belief& b);
Query apply(const Substitution& s, const Query& q);

/// Renames variables to V1, V2, ... in order of first appearance.
Belief canonicalize(const Belief& b);
Query canonicalize(const Query& q);
Atom canonicalize(const Atom& a);

/// Renames every variable X to `prefix + X`. Parsed variables never start
/// with an underscore, so a prefix such as "_" renames formulas apart.
Belief rename_variables(const Belief& b, std::string_view prefix);

std::vector<std::string> variables_of(const std::vector<Atom>& atoms);

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const std::vector<Atom>& conjunction);
std::string to_string(const Belief& b);
std::string to_string(const Query& q);
std::string to_string(const Formula& f);
std::string to_string(const Substitution& s);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ParseOptions {
  std::size_t max_arity = 3;
};

/// Parses one formula: `conj`, `conj -> atom` or `-> conj`.
Formula parse_formula(std::string_view text, const ParseOptions& opts = {}, int line = 1);
Belief parse_belief(std::string_view text, const ParseOptions& opts = {});
Query parse_query(std::string_view text, const ParseOptions& opts = {});
Atom parse_atom(std::string_view text, const ParseOptions& opts = {});
/// Ground conjunction such as a claim; same syntax as a state belief.
std::vector<Atom> parse_conjunction(std::string_view text, const ParseOptions& opts = {});

/// One formula per line; `#` starts a comment; blank lines are skipped.
std::vector<Formula> parse_belief_file(std::string_view text, const ParseOptions& opts = {});

}  // namespace ids
