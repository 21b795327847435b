#pragma once

// The inquiry dialog protocol: acts, per-participant dialog state, legal
// moves, act application and termination.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ids/inference.hpp"

namespace ids {

enum class ActKind { Assert, Open, Close };

struct DialogAct {
  ActKind kind = ActKind::Close;
  Argument argument;  // Assert only
  Belief agenda;      // Open only; canonical domain belief

  static DialogAct make_assert(Argument arg);
  static DialogAct make_open(const Belief& rule);
  static DialogAct make_close();

  bool is_assert() const { return kind == ActKind::Assert; }
  bool is_open() const { return kind == ActKind::Open; }
  bool is_close() const { return kind == ActKind::Close; }

  friend auto operator<=>(const DialogAct&, const DialogAct&) = default;
  friend bool operator==(const DialogAct&, const DialogAct&) = default;
};

/// `Assert({...} |- claim)`, `Open(rule)`, `Close()`.
std::string to_string(const DialogAct& act);
const char* to_string(ActKind kind);

enum class Participant { System, User };

inline Participant other(Participant p) {
  return p == Participant::System ? Participant::User : Participant::System;
}
const char* to_string(Participant p);

struct QueryStore {
  std::vector<Atom> atoms;

  friend auto operator<=>(const QueryStore&, const QueryStore&) = default;
  friend bool operator==(const QueryStore&, const QueryStore&) = default;
};

/// Agenda pushed by opening `rule`: its body atoms followed by its head.
QueryStore agenda_of(const Belief& rule);

/// One participant's view. Everything except `own_beliefs` and `owner` is
/// shared by the two views of a dialog and kept identical by apply_act.
struct DialogState {
  Participant owner = Participant::System;
  BeliefSet own_beliefs;
  BeliefSet cs;
  std::vector<QueryStore> cqs;  // back() is the top
  std::set<DialogAct> history;
  Query query;
  int turn_index = 0;
  bool pending_close = false;
  Participant actor_to_move = Participant::System;
  Participant opener = Participant::System;
  std::optional<int> success_turn;

  const QueryStore* top() const { return cqs.empty() ? nullptr : &cqs.back(); }
};

struct LegalMoves {
  std::vector<DialogAct> asserts;
  std::vector<DialogAct> opens;
  std::vector<DialogAct> closes;

  /// Asserts, then opens, then Close; each group in printed order.
  std::vector<DialogAct> all() const;
  std::size_t size() const { return asserts.size() + opens.size() + closes.size(); }
};

class DialogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DialogViews {
  DialogState system;
  DialogState user;

  DialogState& of(Participant p) { return p == Participant::System ? system : user; }
  const DialogState& of(Participant p) const { return p == Participant::System ? system : user; }
};

/// Throws DialogError for an empty query or an inconsistent belief base.
DialogViews init_dialog(const Query& query, const BeliefSet& sigma_sys, const BeliefSet& sigma_usr,
                        Participant opener = Participant::System);

LegalMoves legal_moves(const DialogState& view);

/// Membership test for legal_moves(view) that checks the conditions
/// directly instead of enumerating.
bool is_legal(const DialogState& view, const DialogAct& act);

struct Event {
  int turn;  // 1-based turn number in which the act was performed
  Participant actor;
  DialogAct act;
};

/// Applies `act` by `actor` to both views. Throws DialogError if it is not
/// the actor's move or the act is not legal for the actor.
Event apply_act(DialogViews& views, const DialogAct& act, Participant actor);

/// True iff `act` asserts a ground instance of the whole query conjunction.
bool check_success(const DialogAct& act, const Query& query);

struct Outcome {
  enum class Kind { Success, Exhausted, TurnCapReached };
  Kind kind;
  int turns_used;

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

const char* to_string(Outcome::Kind kind);

std::optional<Outcome> is_terminal(const DialogState& view, int turn_cap);

/// Tab-separated: turn, actor, kind, formulas. Assert formulas are
/// `{support} |- claim`; Open formulas the rule; Close none.
std::string format_event(const Event& e);
Event parse_event(const std::string& line);

}  // namespace ids
