#include "ids/dialog.hpp"

#include <algorithm>
#include <sstream>

namespace ids {

DialogAct DialogAct::make_assert(Argument arg) {
  DialogAct a;
  a.kind = ActKind::Assert;
  a.argument = std::move(arg);
  return a;
}

DialogAct DialogAct::make_open(const Belief& rule) {
  if (!rule.is_domain()) throw DialogError("Open requires a domain belief");
  DialogAct a;
  a.kind = ActKind::Open;
  a.agenda = canonicalize(rule);
  return a;
}

DialogAct DialogAct::make_close() { return DialogAct{}; }

const char* to_string(ActKind kind) {
  switch (kind) {
    case ActKind::Assert: return "Assert";
    case ActKind::Open: return "Open";
    case ActKind::Close: return "Close";
  }
  return "?";
}

const char* to_string(Participant p) { return p == Participant::System ? "system" : "user"; }

const char* to_string(Outcome::Kind kind) {
  switch (kind) {
    case Outcome::Kind::Success: return "success";
    case Outcome::Kind::Exhausted: return "exhausted";
    case Outcome::Kind::TurnCapReached: return "turn-cap";
  }
  return "?";
}

std::string to_string(const DialogAct& act) {
  switch (act.kind) {
    case ActKind::Assert: return "Assert(" + to_string(act.argument) + ")";
    case ActKind::Open: return "Open(" + to_string(act.agenda) + ")";
    case ActKind::Close: return "Close()";
  }
  return "?";
}

QueryStore agenda_of(const Belief& rule) {
  QueryStore qs{rule.antecedent};
  qs.atoms.push_back(rule.head());
  return qs;
}

std::vector<DialogAct> LegalMoves::all() const {
  std::vector<DialogAct> out;
  out.reserve(size());
  out.insert(out.end(), asserts.begin(), asserts.end());
  out.insert(out.end(), opens.begin(), opens.end());
  out.insert(out.end(), closes.begin(), closes.end());
  return out;
}

DialogViews init_dialog(const Query& query, const BeliefSet& sigma_sys, const BeliefSet& sigma_usr,
                        Participant opener) {
  if (query.atoms.empty()) throw DialogError("query must contain at least one atom");
  if (!is_consistent(sigma_sys)) throw DialogError("system belief base is inconsistent");
  if (!is_consistent(sigma_usr)) throw DialogError("user belief base is inconsistent");
  DialogState base;
  base.query = canonicalize(query);
  base.cqs.push_back(QueryStore{base.query.atoms});
  base.actor_to_move = opener;
  base.opener = opener;
  DialogViews v{base, base};
  v.system.owner = Participant::System;
  v.system.own_beliefs = sigma_sys;
  v.user.owner = Participant::User;
  v.user.own_beliefs = sigma_usr;
  return v;
}

namespace {

bool head_matches_top(const Belief& rule, const QueryStore& top) {
  // Rename apart: the rule and the agenda may reuse variable names.
  Belief renamed = rename_variables(rule, "_");
  return std::any_of(top.atoms.begin(), top.atoms.end(),
                     [&](const Atom& a) { return unify(renamed.head(), a).has_value(); });
}

bool claim_fits(const std::vector<Atom>& claim, std::size_t i, const std::vector<Atom>& targets,
                std::vector<bool>& used, const Substitution& s) {
  if (i == claim.size()) return true;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (used[t]) continue;
    auto next = unify(targets[t], claim[i], s);
    if (!next) continue;
    used[t] = true;
    if (claim_fits(claim, i + 1, targets, used, *next)) return true;
    used[t] = false;
  }
  return false;
}

bool claim_matches(const std::vector<Atom>& claim, const std::vector<Atom>& targets) {
  std::vector<bool> used(targets.size(), false);
  return claim_fits(claim, 0, targets, used, {});
}

}  // namespace

LegalMoves legal_moves(const DialogState& view) {
  LegalMoves moves;
  const QueryStore* top = view.top();
  if (!top) return moves;
  moves.closes.push_back(DialogAct::make_close());

  std::set<Argument> excluded;
  for (const auto& act : view.history)
    if (act.is_assert()) excluded.insert(act.argument);
  for (auto& arg : find_arguments(view.own_beliefs.united(view.cs), top->atoms, excluded))
    moves.asserts.push_back(DialogAct::make_assert(std::move(arg)));

  std::vector<std::pair<std::string, DialogAct>> opens;
  for (const auto& b : view.own_beliefs) {
    if (!b.is_domain() || !head_matches_top(b, *top)) continue;
    DialogAct act = DialogAct::make_open(b);
    if (view.history.contains(act)) continue;
    opens.emplace_back(to_string(act), std::move(act));
  }
  std::sort(opens.begin(), opens.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& [_, act] : opens) moves.opens.push_back(std::move(act));
  return moves;
}

bool is_legal(const DialogState& view, const DialogAct& act) {
  const QueryStore* top = view.top();
  if (!top) return false;
  switch (act.kind) {
    case ActKind::Close:
      return act == DialogAct::make_close();
    case ActKind::Open:
      return act.agenda.is_domain() && act.agenda == canonicalize(act.agenda) &&
             view.own_beliefs.contains(act.agenda) && !view.history.contains(act) &&
             head_matches_top(act.agenda, *top);
    case ActKind::Assert: {
      const auto& [support, claim] = act.argument;
      if (view.history.contains(act) || support.empty() || claim.empty()) return false;
      if (!support.is_subset_of(view.own_beliefs.united(view.cs))) return false;
      for (std::size_t i = 0; i < claim.size(); ++i) {
        if (!claim[i].is_ground()) return false;
        for (std::size_t j = 0; j < i; ++j)
          if (claim[i] == claim[j]) return false;
      }
      // Order of the claim follows the agenda (candidate_claims builds it
      // that way); check the matching and the derivation conditions.
      if (!claim_matches(claim, top->atoms)) return false;
      if (!derives(support, claim) || !is_consistent(support)) return false;
      for (const auto& b : support) {
        BeliefSet smaller;
        for (const auto& other : support)
          if (!(other == b)) smaller.insert(other);
        if (derives(smaller, claim)) return false;
      }
      return true;
    }
  }
  return false;
}

Event apply_act(DialogViews& views, const DialogAct& act, Participant actor) {
  if (views.system.actor_to_move != actor)
    throw DialogError(std::string("it is not the ") + to_string(actor) + "'s move");
  if (!is_legal(views.of(actor), act))
    throw DialogError("illegal act for the " + std::string(to_string(actor)) + ": " + to_string(act));

  const int turn = views.system.turn_index + 1;
  const bool success = check_success(act, views.system.query);
  for (DialogState* v : {&views.system, &views.user}) {
    v->history.insert(act);
    switch (act.kind) {
      case ActKind::Assert:
        v->cs.merge(act.argument.support);
        v->pending_close = false;
        break;
      case ActKind::Open:
        v->cqs.push_back(agenda_of(act.agenda));
        v->pending_close = false;
        break;
      case ActKind::Close:
        if (v->pending_close) {
          v->cqs.pop_back();
          v->pending_close = false;
        } else {
          v->pending_close = true;
        }
        break;
    }
    if (success && !v->success_turn) v->success_turn = turn;
    v->actor_to_move = other(actor);
    if (actor != v->opener) ++v->turn_index;
  }
  return Event{turn, actor, act};
}

namespace {

bool bijective_match(const std::vector<Atom>& query, std::size_t i, const std::vector<Atom>& claim,
                     std::vector<bool>& used, const Substitution& s) {
  if (i == query.size()) return true;
  for (std::size_t c = 0; c < claim.size(); ++c) {
    if (used[c]) continue;
    auto next = unify(query[i], claim[c], s);
    if (!next) continue;
    used[c] = true;
    if (bijective_match(query, i + 1, claim, used, *next)) return true;
    used[c] = false;
  }
  return false;
}

}  // namespace

bool check_success(const DialogAct& act, const Query& query) {
  if (!act.is_assert()) return false;
  const auto& claim = act.argument.claim;
  if (claim.size() != query.atoms.size()) return false;
  for (const auto& a : claim)
    if (!a.is_ground()) return false;
  std::vector<bool> used(claim.size(), false);
  return bijective_match(query.atoms, 0, claim, used, {});
}

std::optional<Outcome> is_terminal(const DialogState& view, int turn_cap) {
  if (view.success_turn) return Outcome{Outcome::Kind::Success, *view.success_turn};
  if (view.cqs.empty()) {
    int begun = view.turn_index + (view.actor_to_move != view.opener ? 1 : 0);
    return Outcome{Outcome::Kind::Exhausted, begun};
  }
  if (view.turn_index >= turn_cap) return Outcome{Outcome::Kind::TurnCapReached, view.turn_index};
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Event log

std::string format_event(const Event& e) {
  std::string out = std::to_string(e.turn) + "\t" + to_string(e.actor) + "\t" + to_string(e.act.kind);
  switch (e.act.kind) {
    case ActKind::Assert: out += "\t" + to_string(e.act.argument); break;
    case ActKind::Open: out += "\t" + to_string(e.act.agenda); break;
    case ActKind::Close: out += "\t"; break;
  }
  return out;
}

Event parse_event(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  for (;;) {
    std::size_t tab = line.find('\t', pos);
    fields.push_back(line.substr(pos, tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  if (fields.size() < 3) throw DialogError("malformed event line: " + line);
  Event e{};
  try {
    e.turn = std::stoi(fields[0]);
  } catch (const std::exception&) {
    throw DialogError("malformed turn in event line: " + line);
  }
  if (fields[1] == "system")
    e.actor = Participant::System;
  else if (fields[1] == "user")
    e.actor = Participant::User;
  else
    throw DialogError("unknown actor: " + fields[1]);
  const std::string payload = fields.size() > 3 ? fields[3] : "";
  if (fields[2] == "Close") {
    e.act = DialogAct::make_close();
  } else if (fields[2] == "Open") {
    e.act = DialogAct::make_open(parse_belief(payload));
  } else if (fields[2] == "Assert") {
    auto close = payload.find("} |- ");
    if (payload.empty() || payload[0] != '{' || close == std::string::npos)
      throw DialogError("malformed assert payload: " + payload);
    Argument arg;
    std::string body = payload.substr(1, close - 1);
    std::size_t p = 0;
    while (p < body.size()) {
      std::size_t semi = body.find("; ", p);
      arg.support.insert(parse_belief(body.substr(p, semi - p)));
      if (semi == std::string::npos) break;
      p = semi + 2;
    }
    arg.claim = parse_conjunction(payload.substr(close + 5));
    e.act = DialogAct::make_assert(std::move(arg));
  } else {
    throw DialogError("unknown act kind: " + fields[2]);
  }
  return e;
}

}  // namespace ids
