#include "ids/logic.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace ids {

bool Atom::is_ground() const {
  for (const auto& t : args)
    if (t.is_variable()) return false;
  return true;
}

Atom Atom::negated() const {
  Atom a = *this;
  a.positive = !positive;
  return a;
}

Belief Belief::state(std::vector<Atom> atoms) {
  return Belief{BeliefKind::State, std::move(atoms), {}};
}

Belief Belief::rule(std::vector<Atom> antecedent, Atom consequent) {
  return Belief{BeliefKind::Domain, std::move(antecedent), {std::move(consequent)}};
}

// ---------------------------------------------------------------------------
// Substitution / unification

Term Substitution::resolve(const Term& t) const {
  Term cur = t;
  // Chains are acyclic: bind() never binds a variable to itself.
  while (cur.is_variable()) {
    auto it = bindings_.find(cur.name);
    if (it == bindings_.end()) break;
    cur = it->second;
  }
  return cur;
}

bool Substitution::bind(const std::string& var, const Term& value) {
  Term lhs = resolve(Term::variable(var));
  Term rhs = resolve(value);
  if (lhs == rhs) return true;
  if (lhs.is_variable()) {
    bindings_[lhs.name] = rhs;
    return true;
  }
  if (rhs.is_variable()) {
    bindings_[rhs.name] = lhs;
    return true;
  }
  return false;
}

std::optional<Substitution> unify(const Atom& a, const Atom& b, const Substitution& s) {
  if (a.positive != b.positive || a.predicate != b.predicate || a.args.size() != b.args.size())
    return std::nullopt;
  Substitution out = s;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    Term x = out.resolve(a.args[i]);
    Term y = out.resolve(b.args[i]);
    if (x == y) continue;
    if (x.is_variable()) {
      out.bind(x.name, y);
    } else if (y.is_variable()) {
      out.bind(y.name, x);
    } else {
      return std::nullopt;
    }
  }
  return out;
}

Term apply(const Substitution& s, const Term& t) { return s.resolve(t); }

Atom apply(const Substitution& s, const Atom& a) {
  Atom out = a;
  for (auto& t : out.args) t = s.resolve(t);
  return out;
}

std::vector<Atom> apply(const Substitution& s, const std::vector<Atom>& atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const auto& a : atoms) out.push_back(apply(s, a));
  return out;
}

Belief apply(const Substitution& s, const Belief& b) {
  return Belief{b.kind, apply(s, b.antecedent), apply(s, b.consequent)};
}

Query apply(const Substitution& s, const Query& q) { return Query{apply(s, q.atoms)}; }

// ---------------------------------------------------------------------------
// Renaming

namespace {

class Renamer {
 public:
  Term operator()(const Term& t) {
    if (!t.is_variable()) return t;
    auto [it, inserted] = names_.try_emplace(t.name, "");
    if (inserted) it->second = "V" + std::to_string(names_.size());
    return Term::variable(it->second);
  }

  void rename(std::vector<Atom>& atoms) {
    for (auto& a : atoms)
      for (auto& t : a.args) t = (*this)(t);
  }

 private:
  std::map<std::string, std::string> names_;
};

}  // namespace

Belief canonicalize(const Belief& b) {
  Belief out = b;
  Renamer r;
  r.rename(out.antecedent);
  r.rename(out.consequent);
  return out;
}

Query canonicalize(const Query& q) {
  Query out = q;
  Renamer r;
  r.rename(out.atoms);
  return out;
}

Atom canonicalize(const Atom& a) {
  std::vector<Atom> v{a};
  Renamer r;
  r.rename(v);
  return v.front();
}

Belief rename_variables(const Belief& b, std::string_view prefix) {
  Belief out = b;
  auto fix = [&](std::vector<Atom>& atoms) {
    for (auto& a : atoms)
      for (auto& t : a.args)
        if (t.is_variable()) t.name = std::string(prefix) + t.name;
  };
  fix(out.antecedent);
  fix(out.consequent);
  return out;
}

std::vector<std::string> variables_of(const std::vector<Atom>& atoms) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& a : atoms)
    for (const auto& t : a.args)
      if (t.is_variable() && seen.insert(t.name).second) out.push_back(t.name);
  return out;
}

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const Atom& a) {
  std::string out = a.positive ? "" : "!";
  out += a.predicate;
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ", ";
    out += a.args[i].name;
  }
  out += ')';
  return out;
}

std::string to_string(const std::vector<Atom>& conjunction) {
  std::string out;
  for (std::size_t i = 0; i < conjunction.size(); ++i) {
    if (i) out += " & ";
    out += to_string(conjunction[i]);
  }
  return out;
}

std::string to_string(const Belief& b) {
  if (b.is_state()) return to_string(b.antecedent);
  return to_string(b.antecedent) + " -> " + to_string(b.consequent);
}

std::string to_string(const Query& q) { return "-> " + to_string(q.atoms); }

std::string to_string(const Formula& f) {
  return std::visit([](const auto& x) { return to_string(x); }, f);
}

std::string to_string(const Substitution& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [var, val] : s.bindings()) {
    if (!first) out += ", ";
    first = false;
    out += var + "->" + s.resolve(val).name;
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Ident, LParen, RParen, Comma, And, Not, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  int column;
};

class Parser {
 public:
  Parser(std::string_view text, const ParseOptions& opts, int line)
      : text_(text), opts_(opts), line_(line) {
    advance();
  }

  Formula formula() {
    if (tok_.kind == Tok::Arrow) {
      advance();
      auto atoms = conjunction();
      expect_end();
      return Query{std::move(atoms)};
    }
    int start = tok_.column;
    auto lhs = conjunction();
    if (tok_.kind == Tok::Arrow) {
      advance();
      Atom head = literal();
      expect_end();
      return Belief::rule(std::move(lhs), std::move(head));
    }
    expect_end();
    for (const auto& a : lhs)
      if (!a.is_ground()) fail("variable in a state belief", start);
    return Belief::state(std::move(lhs));
  }

  std::vector<Atom> conjunction() {
    std::vector<Atom> atoms;
    atoms.push_back(literal());
    while (tok_.kind == Tok::And) {
      advance();
      atoms.push_back(literal());
    }
    return atoms;
  }

  Atom literal() {
    Atom a;
    if (tok_.kind == Tok::Not) {
      a.positive = false;
      advance();
    }
    if (tok_.kind != Tok::Ident) fail("expected predicate", tok_.column);
    if (!std::isupper(static_cast<unsigned char>(tok_.text[0])))
      fail("predicate must start with an uppercase letter", tok_.column);
    a.predicate = tok_.text;
    int pred_col = tok_.column;
    advance();
    if (tok_.kind != Tok::LParen) fail("expected '('", tok_.column);
    advance();
    for (;;) {
      if (tok_.kind != Tok::Ident) fail("expected term", tok_.column);
      a.args.push_back(std::isupper(static_cast<unsigned char>(tok_.text[0]))
                           ? Term::variable(tok_.text)
                           : Term::constant(tok_.text));
      advance();
      if (tok_.kind == Tok::Comma) {
        advance();
        continue;
      }
      if (tok_.kind == Tok::RParen) {
        advance();
        break;
      }
      fail("expected ',' or ')'", tok_.column);
    }
    if (a.args.size() > opts_.max_arity)
      fail("arity " + std::to_string(a.args.size()) + " exceeds maximum " +
               std::to_string(opts_.max_arity),
           pred_col);
    return a;
  }

  void expect_end() {
    if (tok_.kind != Tok::End) fail("unexpected '" + tok_.text + "'", tok_.column);
  }

 private:
  [[noreturn]] void fail(const std::string& msg, int column) const {
    throw ParseError(msg, line_, column);
  }

  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    int col = static_cast<int>(pos_) + 1;
    if (pos_ >= text_.size()) {
      tok_ = {Tok::End, "end of input", col};
      return;
    }
    char c = text_[pos_];
    auto single = [&](Tok k) {
      tok_ = {k, std::string(1, c), col};
      ++pos_;
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      case '&': return single(Tok::And);
      case '!': return single(Tok::Not);
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          tok_ = {Tok::Arrow, "->", col};
          pos_ += 2;
          return;
        }
        break;
      default:
        if (std::isalpha(static_cast<unsigned char>(c))) {
          std::size_t start = pos_;
          while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                         text_[pos_] == '_'))
            ++pos_;
          tok_ = {Tok::Ident, std::string(text_.substr(start, pos_ - start)), col};
          return;
        }
    }
    fail(std::string("unexpected character '") + c + "'", col);
  }

  std::string_view text_;
  const ParseOptions& opts_;
  int line_;
  std::size_t pos_ = 0;
  Token tok_{Tok::End, "", 1};
};

}  // namespace

Formula parse_formula(std::string_view text, const ParseOptions& opts, int line) {
  Parser p(text, opts, line);
  return p.formula();
}

Belief parse_belief(std::string_view text, const ParseOptions& opts) {
  Formula f = parse_formula(text, opts);
  if (auto* b = std::get_if<Belief>(&f)) return *b;
  throw ParseError("expected a belief, found a query", 1, 1);
}

Query parse_query(std::string_view text, const ParseOptions& opts) {
  Formula f = parse_formula(text, opts);
  if (auto* q = std::get_if<Query>(&f)) return *q;
  throw ParseError("expected a query", 1, 1);
}

Atom parse_atom(std::string_view text, const ParseOptions& opts) {
  Parser p(text, opts, 1);
  Atom a = p.literal();
  p.expect_end();
  return a;
}

std::vector<Atom> parse_conjunction(std::string_view text, const ParseOptions& opts) {
  Parser p(text, opts, 1);
  auto atoms = p.conjunction();
  p.expect_end();
  return atoms;
}

std::vector<Formula> parse_belief_file(std::string_view text, const ParseOptions& opts) {
  std::vector<Formula> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    ++line_no;
    pos = nl + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    bool blank = true;
    for (char c : line)
      if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
    if (!blank) out.push_back(parse_formula(line, opts, line_no));
    if (nl == text.size()) break;
  }
  return out;
}

}  // namespace ids
