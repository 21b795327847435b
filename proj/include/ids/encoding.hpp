#pragma once

// Integer codes for dialog states and acts over a fixed corpus. Replay
// transitions store codes; both Q-function encoders read them.

#include <map>
#include <stdexcept>
#include <vector>

#include "ids/corpus.hpp"
#include "ids/dialog.hpp"

namespace ids {

class EncodingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StateCode {
  std::vector<int> own;  // belief ids, ascending
  std::vector<int> cs;   // belief ids, ascending
  int top = -1;          // store id, -1 when the cQS is empty

  friend auto operator<=>(const StateCode&, const StateCode&) = default;
  friend bool operator==(const StateCode&, const StateCode&) = default;
};

struct ActCode {
  ActKind kind = ActKind::Close;
  std::vector<int> beliefs;  // Assert: support ids ascending; Open: the rule id
  std::vector<int> claim;    // Assert only: atom ids in claim order

  friend auto operator<=>(const ActCode&, const ActCode&) = default;
  friend bool operator==(const ActCode&, const ActCode&) = default;
};

/// Tables of every formula a dialog over the corpus can mention:
///  - beliefs: the corpus beliefs;
///  - stores: the query store and the agenda of each rule;
///  - atoms: store atoms (each canonicalized on its own) and the ground
///    atoms of the corpus closure, which contain every possible claim atom.
class CorpusIndex {
 public:
  CorpusIndex(const std::vector<Belief>& beliefs, const Query& query);
  explicit CorpusIndex(const Corpus& corpus) : CorpusIndex(corpus.beliefs(), corpus.query) {}

  const std::vector<Belief>& beliefs() const { return beliefs_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<QueryStore>& stores() const { return stores_; }
  /// Atom ids of each store, in store order.
  const std::vector<std::vector<int>>& store_atoms() const { return store_atoms_; }
  const Query& query() const { return query_; }

  int belief_id(const Belief& b) const;  // -1 if absent
  int atom_id(const Atom& a) const;      // canonicalizes; -1 if absent
  int store_id(const QueryStore& s) const;

  StateCode encode(const DialogState& view) const;
  ActCode encode(const DialogAct& act) const;
  std::vector<ActCode> encode(const std::vector<DialogAct>& acts) const;

 private:
  int intern_atom(const Atom& a);

  std::vector<Belief> beliefs_;
  std::map<Belief, int> belief_ids_;
  std::vector<Atom> atoms_;
  std::map<Atom, int> atom_ids_;
  std::vector<QueryStore> stores_;
  std::vector<std::vector<int>> store_atoms_;
  std::map<QueryStore, int> store_ids_;
  Query query_;
};

}  // namespace ids
