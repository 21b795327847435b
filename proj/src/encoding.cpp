#include "ids/encoding.hpp"

#include <algorithm>

namespace ids {

CorpusIndex::CorpusIndex(const std::vector<Belief>& beliefs, const Query& query)
    : query_(canonicalize(query)) {
  for (const auto& raw : beliefs) {
    Belief b = canonicalize(raw);
    if (belief_ids_.emplace(b, static_cast<int>(beliefs_.size())).second) beliefs_.push_back(b);
  }
  auto add_store = [&](QueryStore s) {
    if (store_ids_.contains(s)) return;
    std::vector<int> ids;
    for (const auto& a : s.atoms) ids.push_back(intern_atom(a));
    store_ids_.emplace(s, static_cast<int>(stores_.size()));
    stores_.push_back(std::move(s));
    store_atoms_.push_back(std::move(ids));
  };
  add_store(QueryStore{query_.atoms});
  for (const auto& b : beliefs_)
    if (b.is_domain()) add_store(agenda_of(b));
  for (const auto& a : closure(BeliefSet(beliefs_))) intern_atom(a);
}

int CorpusIndex::intern_atom(const Atom& raw) {
  Atom a = canonicalize(raw);
  auto [it, inserted] = atom_ids_.emplace(a, static_cast<int>(atoms_.size()));
  if (inserted) atoms_.push_back(a);
  return it->second;
}

int CorpusIndex::belief_id(const Belief& b) const {
  auto it = belief_ids_.find(canonicalize(b));
  return it == belief_ids_.end() ? -1 : it->second;
}

int CorpusIndex::atom_id(const Atom& a) const {
  auto it = atom_ids_.find(canonicalize(a));
  return it == atom_ids_.end() ? -1 : it->second;
}

int CorpusIndex::store_id(const QueryStore& s) const {
  auto it = store_ids_.find(s);
  return it == store_ids_.end() ? -1 : it->second;
}

namespace {

std::vector<int> belief_ids(const CorpusIndex& ix, const BeliefSet& bs) {
  std::vector<int> out;
  out.reserve(bs.size());
  for (const auto& b : bs) {
    int id = ix.belief_id(b);
    if (id < 0) throw EncodingError("belief not in the corpus: " + to_string(b));
    out.push_back(id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

StateCode CorpusIndex::encode(const DialogState& view) const {
  StateCode c;
  c.own = belief_ids(*this, view.own_beliefs);
  c.cs = belief_ids(*this, view.cs);
  if (const QueryStore* top = view.top()) {
    c.top = store_id(*top);
    if (c.top < 0) throw EncodingError("query store not in the corpus: " + to_string(top->atoms));
  }
  return c;
}

ActCode CorpusIndex::encode(const DialogAct& act) const {
  ActCode c;
  c.kind = act.kind;
  switch (act.kind) {
    case ActKind::Assert:
      c.beliefs = belief_ids(*this, act.argument.support);
      for (const auto& a : act.argument.claim) {
        int id = atom_id(a);
        if (id < 0) throw EncodingError("claim atom not derivable from the corpus: " + to_string(a));
        c.claim.push_back(id);
      }
      break;
    case ActKind::Open: {
      int id = belief_id(act.agenda);
      if (id < 0) throw EncodingError("rule not in the corpus: " + to_string(act.agenda));
      c.beliefs.push_back(id);
      break;
    }
    case ActKind::Close:
      break;
  }
  return c;
}

std::vector<ActCode> CorpusIndex::encode(const std::vector<DialogAct>& acts) const {
  std::vector<ActCode> out;
  out.reserve(acts.size());
  for (const auto& a : acts) out.push_back(encode(a));
  return out;
}

}  // namespace ids
