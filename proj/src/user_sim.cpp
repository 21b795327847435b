#include "ids/user_sim.hpp"

namespace ids {

DialogAct exhaustive_act(const LegalMoves& moves, Rng& rng) {
  if (!moves.asserts.empty()) return moves.asserts[rng.index(moves.asserts.size())];
  if (!moves.opens.empty()) return moves.opens[rng.index(moves.opens.size())];
  if (!moves.closes.empty()) return moves.closes[rng.index(moves.closes.size())];
  throw DialogError("no legal moves: the dialog is over");
}

DialogAct exhaustive_act(const DialogState& view, Rng& rng) {
  return exhaustive_act(legal_moves(view), rng);
}

std::vector<DialogAct> non_conflicting(const DialogState& view, const LegalMoves& moves) {
  std::vector<DialogAct> out;
  // Supports are drawn from own beliefs and the CS, so own ∪ CS ∪ support is
  // the same set for every Assert: either all of them qualify or none.
  if (is_consistent(view.own_beliefs.united(view.cs)))
    out.insert(out.end(), moves.asserts.begin(), moves.asserts.end());
  out.insert(out.end(), moves.opens.begin(), moves.opens.end());
  out.insert(out.end(), moves.closes.begin(), moves.closes.end());
  return out;
}

DialogAct random_act(const DialogState& view, const LegalMoves& moves, Rng& rng) {
  auto eligible = non_conflicting(view, moves);
  if (eligible.empty()) throw DialogError("no legal moves: the dialog is over");
  return eligible[rng.index(eligible.size())];
}

DialogAct random_act(const DialogState& view, Rng& rng) {
  return random_act(view, legal_moves(view), rng);
}

DialogAct hybrid_act(const DialogState& view, const LegalMoves& moves, const SimulatorConfig& cfg,
                     Rng& rng) {
  if (rng.bernoulli(cfg.p)) return exhaustive_act(moves, rng);
  return random_act(view, moves, rng);
}

DialogAct hybrid_act(const DialogState& view, const SimulatorConfig& cfg, Rng& rng) {
  return hybrid_act(view, legal_moves(view), cfg, rng);
}

}  // namespace ids
