#include "doctest.h"

#include <cmath>
#include <map>

#include "fixtures.hpp"
#include "ids/evaluation.hpp"
#include "ids/gradient_check.hpp"
#include "ids/rl.hpp"

using namespace ids;

namespace {

Corpus shipped() { return load_corpus(IDS_DATA_DIR "/compliance.txt"); }

double discounted(const std::vector<double>& r, double gamma) {
  double g = 0, w = 1;
  for (double x : r) {
    g += w * x;
    w *= gamma;
  }
  return g;
}

Transition tagged(int k) {
  Transition t;
  t.reward = k;
  return t;
}

// Sets every parameter to zero except the output bias.
void constant_q(QFunction& q, double value) {
  for (auto& b : q.blocks()) b.value->setZero();
  auto blocks = q.blocks();
  for (auto& b : blocks)
    if (b.name == "b_out" || b.name == "b3") (*b.value)(0, 0) = value;
  q.refresh();
}

}  // namespace

TEST_CASE("epsilon schedule") {
  TrainConfig cfg;
  CHECK(epsilon(0, cfg) == 1.0);
  CHECK(epsilon(25, cfg) == doctest::Approx(0.525).epsilon(1e-15));
  CHECK(epsilon(50, cfg) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(epsilon(99, cfg) == 0.05);
  CHECK_THROWS_AS(epsilon(-1, cfg), std::invalid_argument);
  for (int e = 1; e < 100; ++e) CHECK(epsilon(e, cfg) <= epsilon(e - 1, cfg));
}

TEST_CASE("reward cases and discounted return") {
  RewardConfig r;
  CHECK(turn_reward(true, r) == 20.0);
  CHECK(turn_reward(false, r) == -1.0);
  CHECK(discounted({-1, -1, 20}, 0.99) == doctest::Approx(17.612).epsilon(1e-12));
  CHECK_THROWS_AS((RewardConfig{20, -1, 0.99}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((RewardConfig{20, 1, 1.5}).validate(), std::invalid_argument);
  CHECK_NOTHROW((RewardConfig{0, 0, 0}).validate());
}

TEST_CASE("train configuration checks") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps_end = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = TrainConfig{};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  CHECK(parse_encoder("bagmlp") == Encoder::BagMlp);
  CHECK_THROWS_AS(parse_encoder("lstm"), std::invalid_argument);
}

TEST_CASE("replay buffer is a FIFO ring") {
  ReplayBuffer buf(5);
  for (int k = 0; k < 3; ++k) buf.push(tagged(k));
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).reward == 0);
  for (int k = 3; k < 8; ++k) buf.push(tagged(k));
  CHECK(buf.size() == 5);
  CHECK(buf.insertions() == 8);
  for (int i = 0; i < 5; ++i) CHECK(buf.at(i).reward == 3 + i);
  CHECK_THROWS_AS(buf.at(5), std::out_of_range);
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);

  Rng rng(1);
  std::map<std::size_t, int> hits;
  for (std::size_t i : buf.sample_indices(5000, rng)) ++hits[i];
  CHECK(hits.size() == 5);
  for (const auto& [i, n] : hits) CHECK(std::abs(n / 5000.0 - 0.2) < 0.03);
}

TEST_CASE("property: replay keeps exactly the last capacity insertions") {
  for (std::size_t cap : {1u, 2u, 7u, 32u}) {
    ReplayBuffer buf(cap);
    for (int k = 0; k < 100; ++k) {
      buf.push(tagged(k));
      const std::size_t n = std::min<std::size_t>(cap, k + 1);
      REQUIRE(buf.size() == n);
      for (std::size_t i = 0; i < n; ++i) CHECK(buf.at(i).reward == k + 1 - static_cast<int>(n) + static_cast<int>(i));
    }
  }
}

TEST_CASE("greedy selection, ties and exploration rate") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng rng(4);
  EmbeddedQ q(ix, 5, 10, rng);
  ReachableSample s = sample_reachable(c, rng, 2);
  std::vector<DialogAct> legal = legal_moves(s.view).all();
  while (legal.size() < 3) {
    s = sample_reachable(c, rng, 2);
    legal = legal_moves(s.view).all();
  }
  const StateCode sc = ix->encode(s.view);
  const std::vector<ActCode> codes = ix->encode(legal);
  std::vector<double> values;
  q.q_many(sc, codes, values);
  const std::size_t best = std::max_element(values.begin(), values.end()) - values.begin();
  for (int i = 0; i < 20; ++i) CHECK(select_act(q, sc, legal, codes, 0.0, rng) == best);

  const int n = 10000;
  int off = 0;
  for (int i = 0; i < n; ++i) off += select_act(q, sc, legal, codes, 0.3, rng) != best;
  const double expected = 0.3 * (legal.size() - 1) / legal.size();
  CHECK(std::abs(static_cast<double>(off) / n - expected) <= 0.02);

  std::map<std::size_t, int> uniform;
  for (int i = 0; i < 6000; ++i) ++uniform[select_act(q, sc, legal, codes, 1.0, rng)];
  CHECK(uniform.size() == legal.size());

  constant_q(q, 3.0);
  std::size_t first = 0;
  for (std::size_t i = 1; i < legal.size(); ++i)
    if (to_string(legal[i]) < to_string(legal[first])) first = i;
  CHECK(select_act(q, sc, legal, codes, 0.0, rng) == first);
  CHECK_THROWS_AS(select_act(q, sc, {}, {}, 0.0, rng), std::invalid_argument);
}

TEST_CASE("TD targets") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng rng(6);
  EmbeddedQ q(ix, 5, 10, rng);
  constant_q(q, 10.0);
  ReachableSample s = sample_reachable(c, rng);
  Transition t;
  t.state = ix->encode(s.view);
  t.act = ix->encode(s.act);
  t.next_state = t.state;
  t.next_legal = ix->encode(legal_moves(s.view).all());
  t.reward = 20;
  t.terminal = true;
  CHECK(td_target(t, q, 0.99) == 20.0);
  t.terminal = false;
  t.reward = -1;
  CHECK(td_target(t, q, 0.99) == doctest::Approx(8.9).epsilon(1e-14));
  CHECK(td_target(t, q, 0.0) == -1.0);
  t.next_legal.clear();
  CHECK_THROWS_AS(td_target(t, q, 0.99), std::invalid_argument);
  t.terminal = true;
  CHECK(td_target(t, q, 0.99) == -1.0);
}

TEST_CASE("train step loss and updates") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng rng(7);
  std::vector<Transition> ts;
  for (int i = 0; i < 6; ++i) {
    ReachableSample s = sample_reachable(c, rng);
    Transition t;
    t.state = ix->encode(s.view);
    t.act = ix->encode(s.act);
    t.reward = rng.uniform(-2, 5);
    t.terminal = true;
    ts.push_back(t);
  }
  for (Encoder enc : {Encoder::Embedded, Encoder::BagMlp}) {
    TrainConfig cfg;
    cfg.encoder = enc;
    cfg.hidden = 16;
    Rng init(9);
    auto q = make_qfunction(cfg, ix, init);
    auto target = q->clone();

    // Targets equal to the predictions: zero loss, nothing moves.
    std::vector<Transition> exact = ts;
    for (auto& t : exact) t.reward = q->q(t.state, t.act);
    std::vector<const Transition*> eb;
    for (auto& t : exact) eb.push_back(&t);
    auto before = q->clone();
    CHECK(train_step(*q, *target, eb, 0.1, 0.99) == 0.0);
    auto bq = before->blocks(), aq = q->blocks();
    for (std::size_t k = 0; k < bq.size(); ++k) CHECK(*bq[k].value == *aq[k].value);

    // One transition: loss is the squared error.
    const double pred = q->q(ts[0].state, ts[0].act);
    CHECK(train_step(*q, *target, {&ts[0]}, 0.0, 0.99) ==
          doctest::Approx((pred - ts[0].reward) * (pred - ts[0].reward)).epsilon(1e-14));

    // A fixed batch: loss falls monotonically towards zero.
    std::vector<const Transition*> batch;
    for (auto& t : ts) batch.push_back(&t);
    const double lr = enc == Encoder::Embedded ? 0.002 : 0.05;
    double first = 0, last = 0, prev = 1e300;
    bool monotone = true;
    for (int step = 0; step < 2000; ++step) {
      last = train_step(*q, *target, batch, lr, 0.99);
      if (step == 0) first = last;
      monotone &= last <= prev * (1 + 1e-9);
      prev = last;
    }
    INFO("encoder ", std::string(to_string(enc)), " first ", first, " last ", last);
    CHECK(monotone);
    CHECK(last < 0.05 * first);
  }
}

TEST_CASE("non-finite losses abort") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng rng(8);
  EmbeddedQ q(ix, 5, 10, rng);
  ReachableSample s = sample_reachable(c, rng);
  Transition t;
  t.state = ix->encode(s.view);
  t.act = ix->encode(s.act);
  t.reward = std::nan("");
  t.terminal = true;
  CHECK_THROWS_AS(train_step(q, q, {&t}, 0.01, 0.99), TrainingError);
}

TEST_CASE("episode structure") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng init(10);
  EmbeddedQ q(ix, 5, 10, init);
  const RewardConfig reward;
  bool saw_turn3 = false;
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    Scenario sc = generate_scenario(c, SplitMode::RB, rng);
    Episode ep = run_episode(q, sc, SimulatorConfig{0.75}, 0.5, reward, 40, rng);
    REQUIRE(!ep.transitions.empty());
    CHECK(ep.rewards.size() == ep.transitions.size());
    for (std::size_t k = 0; k + 1 < ep.transitions.size(); ++k) {
      CHECK_FALSE(ep.transitions[k].terminal);
      CHECK(ep.transitions[k].next_state == ep.transitions[k + 1].state);
      CHECK_FALSE(ep.transitions[k].next_legal.empty());
    }
    CHECK(ep.transitions.back().terminal);
    for (std::size_t k = 0; k + 1 < ep.rewards.size(); ++k) CHECK(ep.rewards[k] == -1.0);
    if (ep.success()) {
      const int T = ep.outcome.turns_used;
      CHECK(ep.rewards.size() == static_cast<std::size_t>(T));
      CHECK(ep.rewards.back() == 20.0);
      CHECK(ep.total_reward() == reward.w_pos - (T - 1) * reward.w_neg);
      if (T == 3) {
        saw_turn3 = true;
        CHECK(ep.rewards == std::vector<double>{-1, -1, 20});
        CHECK(discounted(ep.rewards, reward.gamma) == doctest::Approx(17.612).epsilon(1e-12));
      }
    } else {
      CHECK(ep.rewards.back() == -1.0);
    }
  }
  CHECK(saw_turn3);
}

TEST_CASE("turn cap of one ends after one penalized transition") {
  const Corpus c = testing::one_step_corpus();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng init(1);
  EmbeddedQ q(ix, 5, 10, init);
  Scenario sc = testing::one_step_scenario();
  // The system does not answer and the user only holds the rule's fact.
  sc.sigma_sys = BeliefSet{c.domain[0]};
  sc.sigma_usr = BeliefSet{c.state[1]};
  Rng rng(2);
  Episode ep = run_episode(q, sc, SimulatorConfig{1.0}, 0.0, RewardConfig{}, 1, rng);
  REQUIRE(ep.transitions.size() == 1);
  CHECK(ep.rewards == std::vector<double>{-1.0});
  CHECK(ep.transitions[0].terminal);
  CHECK_FALSE(ep.success());
}

TEST_CASE("episodes repeat under a fixed seed") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng init(3);
  EmbeddedQ q(ix, 5, 10, init);
  for (int i = 0; i < 20; ++i) {
    Rng a(100 + i), b(100 + i);
    Scenario s1 = generate_scenario(c, SplitMode::RB, a), s2 = generate_scenario(c, SplitMode::RB, b);
    Episode e1 = run_episode(q, s1, SimulatorConfig{0.75}, 0.3, RewardConfig{}, 40, a);
    Episode e2 = run_episode(q, s2, SimulatorConfig{0.75}, 0.3, RewardConfig{}, 40, b);
    CHECK(e1.rewards == e2.rewards);
    CHECK(e1.outcome == e2.outcome);
    REQUIRE(e1.transitions.size() == e2.transitions.size());
    for (std::size_t k = 0; k < e1.transitions.size(); ++k) CHECK(e1.transitions[k].act == e2.transitions[k].act);
  }
}

TEST_CASE("toy MDP: the learned greedy policy is the value-iteration optimum") {
  // Three states, two actions. Rewards and successors (-1 is the end):
  //   s0: a0 -> s1 r0,   a1 -> s2 r1      (a1 is the myopic choice)
  //   s1: a0 -> end r10, a1 -> s0 r0
  //   s2: a0 -> end r2,  a1 -> end r0
  const int next[3][2] = {{1, 2}, {-1, 0}, {-1, -1}};
  const double rew[3][2] = {{0, 1}, {10, 0}, {2, 0}};
  const double gamma = 0.9;

  double V[3] = {0, 0, 0}, Qv[3][2];
  for (int it = 0; it < 200; ++it)
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < 2; ++a) Qv[s][a] = rew[s][a] + (next[s][a] < 0 ? 0.0 : gamma * V[next[s][a]]);
      V[s] = std::max(Qv[s][0], Qv[s][1]);
    }

  const Corpus c = parse_corpus("S0(x)\nS1(x)\nS2(x)\nA0(x)\nA1(x)\n-> S0(X)\n");
  auto ix = std::make_shared<const CorpusIndex>(c);
  auto state = [](int s) { return StateCode{{s}, {}, -1}; };
  auto act = [](int a) { return ActCode{ActKind::Open, {3 + a}, {}}; };
  const std::vector<DialogAct> legal{DialogAct::make_open(parse_belief("A(X) -> B(X)")),
                                     DialogAct::make_open(parse_belief("A(X) -> C(X)"))};
  const std::vector<ActCode> codes{act(0), act(1)};

  ReplayBuffer buf(64);
  for (int s = 0; s < 3; ++s)
    for (int a = 0; a < 2; ++a) {
      Transition t;
      t.state = state(s);
      t.act = act(a);
      t.reward = rew[s][a];
      t.terminal = next[s][a] < 0;
      if (!t.terminal) {
        t.next_state = state(next[s][a]);
        t.next_legal = codes;
      }
      buf.push(t);
    }

  Rng rng(5);
  BagMlpQ q(ix, 16, rng);
  auto target = q.clone();
  for (int step = 0; step < 6000; ++step) {
    std::vector<const Transition*> batch;
    for (std::size_t i : buf.sample_indices(6, rng)) batch.push_back(&buf.at(i));
    train_step(q, *target, batch, 0.1, gamma);
    if (step % 100 == 99) target = q.clone();
  }
  for (int s = 0; s < 3; ++s) {
    const int opt = Qv[s][0] >= Qv[s][1] ? 0 : 1;
    CHECK(select_act(q, state(s), legal, codes, 0.0, rng) == static_cast<std::size_t>(opt));
    for (int a = 0; a < 2; ++a) CHECK(std::abs(q.q(state(s), act(a)) - Qv[s][a]) < 0.5);
  }
}

TEST_CASE("one-step scenario is learned and answered in one transition") {
  const Corpus c = testing::one_step_corpus();
  auto ix = std::make_shared<const CorpusIndex>(c);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.dialogs_per_epoch = 100;
  cfg.eps_anneal_epochs = 2;
  cfg.target_sync_episodes = 50;
  cfg.seed = 4;
  TrainResult r = train(cfg, RewardConfig{}, SimulatorConfig{1.0}, ix,
                        [](Rng&) { return testing::one_step_scenario(); });
  REQUIRE(r.curve.size() == 3);
  Rng rng(1);
  Episode ep = run_episode(*r.q, testing::one_step_scenario(), SimulatorConfig{1.0}, 0.0, RewardConfig{}, 40, rng);
  REQUIRE(ep.transitions.size() == 1);
  CHECK(ep.rewards[0] == 20.0);
  CHECK(ep.success());
}

TEST_CASE("training is reproducible and independent of the execution mode") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  auto source = [&c](Rng& r) { return generate_scenario(c, SplitMode::RB, r); };
  for (Encoder enc : {Encoder::Embedded, Encoder::BagMlp}) {
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.dialogs_per_epoch = 40;
    cfg.eps_anneal_epochs = 1;
    cfg.target_sync_episodes = 20;
    cfg.encoder = enc;
    cfg.hidden = 16;
    TrainResult a = train(cfg, RewardConfig{}, SimulatorConfig{1.0}, ix, source);
    TrainResult b = train(cfg, RewardConfig{}, SimulatorConfig{1.0}, ix, source);
    cfg.exec = Exec::Parallel;
    TrainResult p = train(cfg, RewardConfig{}, SimulatorConfig{1.0}, ix, source);
    const std::string curve = format_learning_curve(a.curve);
    CHECK(curve == format_learning_curve(b.curve));
    CHECK(curve == format_learning_curve(p.curve));
    auto ba = a.q->blocks(), bb = b.q->blocks(), bp = p.q->blocks();
    for (std::size_t k = 0; k < ba.size(); ++k) {
      CHECK(*ba[k].value == *bb[k].value);
      CHECK(*ba[k].value == *bp[k].value);
    }
  }
}

TEST_CASE("zero epochs return the initial parameters") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 12;
  TrainResult r = train(cfg, RewardConfig{}, SimulatorConfig{}, ix, [&c](Rng& g) { return generate_scenario(c, SplitMode::RB, g); });
  CHECK(r.curve.empty());
  Rng init(stream_seed(12, 0));
  auto fresh = make_qfunction(cfg, ix, init);
  auto a = r.q->blocks(), b = fresh->blocks();
  for (std::size_t k = 0; k < a.size(); ++k) CHECK(*a[k].value == *b[k].value);
  CHECK(format_learning_curve({}) == "epoch,mean_return,success_rate,epsilon,loss_mean\n");
}
