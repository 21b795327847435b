#include "doctest.h"

#include <cmath>
#include <map>

#include "ids/corpus.hpp"
#include "ids/user_sim.hpp"

using namespace ids;

namespace {

DialogAct assert_of(const char* fact) {
  Belief b = parse_belief(fact);
  return DialogAct::make_assert(Argument{BeliefSet{b}, b.atoms()});
}

DialogAct open_of(const char* rule) { return DialogAct::make_open(canonicalize(parse_belief(rule))); }

// A user view whose own beliefs contradict the commitment store, so no
// Assert is free of conflict.
DialogState conflicted_view() {
  DialogState v;
  v.owner = Participant::User;
  v.own_beliefs = BeliefSet{parse_belief("A(x)")};
  v.cs = BeliefSet{parse_belief("!A(x)")};
  v.cqs.push_back(QueryStore{{parse_atom("A(X)")}});
  return v;
}

DialogState plain_view() {
  DialogState v;
  v.owner = Participant::User;
  v.own_beliefs = BeliefSet{parse_belief("A(x)")};
  v.cqs.push_back(QueryStore{{parse_atom("A(X)")}});
  return v;
}

}  // namespace

TEST_CASE("exhaustive cascade prefers asserts, then opens, then close") {
  Rng rng(3);
  LegalMoves m;
  m.asserts = {assert_of("A(x)")};
  m.opens = {open_of("B(X) -> A(X)")};
  m.closes = {DialogAct::make_close()};
  for (int i = 0; i < 50; ++i) CHECK(exhaustive_act(m, rng) == m.asserts[0]);

  m.asserts.clear();
  m.opens.push_back(open_of("C(X) -> A(X)"));
  std::map<DialogAct, int> counts;
  for (int i = 0; i < 4000; ++i) ++counts[exhaustive_act(m, rng)];
  REQUIRE(counts.size() == 2);
  for (const auto& [act, n] : counts) {
    CHECK(act.is_open());
    CHECK(std::abs(n / 4000.0 - 0.5) <= 0.03);
  }

  m.opens.clear();
  CHECK(exhaustive_act(m, rng).is_close());
  CHECK_THROWS_AS(exhaustive_act(LegalMoves{}, rng), DialogError);
}

TEST_CASE("random policy filters conflicting asserts") {
  Rng rng(5);
  LegalMoves m;
  m.asserts = {assert_of("A(x)")};
  m.closes = {DialogAct::make_close()};

  auto ok = non_conflicting(plain_view(), m);
  CHECK(ok == m.all());
  std::map<bool, int> kinds;
  for (int i = 0; i < 4000; ++i) ++kinds[random_act(plain_view(), m, rng).is_close()];
  CHECK(std::abs(kinds[true] / 4000.0 - 0.5) <= 0.03);

  auto filtered = non_conflicting(conflicted_view(), m);
  REQUIRE(filtered.size() == 1);
  CHECK(filtered[0].is_close());
  for (int i = 0; i < 100; ++i) CHECK(random_act(conflicted_view(), m, rng).is_close());

  m.opens = {open_of("B(X) -> A(X)")};
  CHECK(non_conflicting(conflicted_view(), m).size() == 2);
}

TEST_CASE("hybrid mixing frequency follows p") {
  LegalMoves m;
  m.asserts = {assert_of("A(x)")};
  m.closes = {DialogAct::make_close()};
  // The random branch can only close here, so Assert marks the rule branch.
  for (double p : {0.0, 0.25, 0.75, 1.0}) {
    Rng rng(11);
    int rule = 0;
    for (int i = 0; i < 10000; ++i) rule += hybrid_act(conflicted_view(), m, SimulatorConfig{p}, rng).is_assert();
    CHECK(std::abs(rule / 10000.0 - p) <= 0.02);
    if (p == 0.0) CHECK(rule == 0);
    if (p == 1.0) CHECK(rule == 10000);
  }
}

TEST_CASE("simulator configuration bounds") {
  CHECK_NOTHROW(SimulatorConfig{0.0}.validate());
  CHECK_NOTHROW(SimulatorConfig{1.0}.validate());
  CHECK_THROWS_AS(SimulatorConfig{1.5}.validate(), std::invalid_argument);
  CHECK_THROWS_AS(SimulatorConfig{-0.1}.validate(), std::invalid_argument);
}

TEST_CASE("property: simulator acts are legal, deterministic and never close early") {
  const Corpus corpus = load_corpus(IDS_DATA_DIR "/compliance.txt");
  Rng scen(21);
  int checked = 0;
  for (int d = 0; d < 30; ++d) {
    Scenario sc = generate_scenario(corpus, SplitMode::RB, scen);
    DialogViews v = init_dialog(sc.query, sc.sigma_sys, sc.sigma_usr);
    Rng play(100 + d);
    while (!is_terminal(v.system, 40)) {
      const Participant actor = v.system.actor_to_move;
      const DialogState& view = v.of(actor);
      const LegalMoves moves = legal_moves(view);
      Rng a(d * 1000 + checked), b(d * 1000 + checked);
      const DialogAct ex = exhaustive_act(view, a);
      CHECK(ex == exhaustive_act(view, b));
      if (!moves.asserts.empty() || !moves.opens.empty()) CHECK_FALSE(ex.is_close());
      CHECK(is_legal(view, random_act(view, a)));
      const DialogAct act = hybrid_act(view, SimulatorConfig{0.5}, play);
      CHECK(is_legal(view, act));
      apply_act(v, act, actor);
      ++checked;
    }
  }
  CHECK(checked > 100);
}
