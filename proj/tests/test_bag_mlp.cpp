#include "doctest.h"

#include <cmath>

#include "ids/bag_mlp.hpp"
#include "ids/corpus.hpp"
#include "ids/gradient_check.hpp"
#include "ids/qfunction.hpp"

using namespace ids;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Corpus shipped() { return load_corpus(IDS_DATA_DIR "/compliance.txt"); }

double ref_mlp(const MlpParams& p, const VectorXd& x) {
  auto layer = [](const MatrixXd& W, const MatrixXd& b, const std::vector<double>& in) {
    std::vector<double> out(W.rows());
    for (int i = 0; i < W.rows(); ++i) {
      double s = b(i, 0);
      for (int j = 0; j < W.cols(); ++j) s += W(i, j) * in[j];
      out[i] = 1.0 / (1.0 + std::exp(-s));
    }
    return out;
  };
  std::vector<double> in(x.data(), x.data() + x.size());
  std::vector<double> h2 = layer(p.W2, p.b2, layer(p.W1, p.b1, in));
  double q = p.b3(0, 0);
  for (std::size_t i = 0; i < h2.size(); ++i) q += p.W3(0, static_cast<int>(i)) * h2[i];
  return q;
}

// Worked-example split of the shipped corpus after the system opens the first rule
// and the user asserts its fact.
DialogState table_state() {
  const Corpus c = shipped();
  BeliefSet sys{c.domain[0], c.state[1]}, usr{c.state[0]};
  DialogViews v = init_dialog(c.query, sys, usr);
  apply_act(v, legal_moves(v.system).opens.at(0), Participant::System);
  for (const auto& a : legal_moves(v.user).asserts)
    if (a.argument.claim.size() == 2) {
      apply_act(v, a, Participant::User);
      break;
    }
  REQUIRE(v.system.cs.size() == 1);
  return v.system;
}

void check_membership(const CorpusIndex& ix, const DialogState& view, const DialogAct& act) {
  const BagLayout L(ix);
  const VectorXd x = bag_encode(ix, view, act);
  REQUIRE(x.size() == L.size());
  for (int i = 0; i < x.size(); ++i) CHECK((x(i) == 0.0 || x(i) == 1.0));
  for (std::size_t i = 0; i < ix.beliefs().size(); ++i) {
    const Belief& b = ix.beliefs()[i];
    const int id = static_cast<int>(i);
    CHECK((x(L.own(id)) == 1.0) == view.own_beliefs.contains(b));
    CHECK((x(L.cs(id)) == 1.0) == view.cs.contains(b));
    const bool in_act = (act.is_assert() && act.argument.support.contains(b)) || (act.is_open() && act.agenda == b);
    CHECK((x(L.act_belief(id)) == 1.0) == in_act);
  }
  for (std::size_t s = 0; s < ix.stores().size(); ++s)
    CHECK((x(L.top(static_cast<int>(s))) == 1.0) == (view.top() && *view.top() == ix.stores()[s]));
  for (std::size_t a = 0; a < ix.atoms().size(); ++a) {
    bool in_claim = false;
    if (act.is_assert())
      for (const auto& c : act.argument.claim) in_claim |= canonicalize(c) == ix.atoms()[a];
    CHECK((x(L.claim_atom(static_cast<int>(a))) == 1.0) == in_claim);
  }
  for (ActKind k : {ActKind::Assert, ActKind::Open, ActKind::Close})
    CHECK((x(L.kind(k)) == 1.0) == (act.kind == k));
}

}  // namespace

TEST_CASE("empty commitment store and Close have empty blocks") {
  const Corpus c = shipped();
  CorpusIndex ix(c);
  const BagLayout L(ix);
  DialogViews v = init_dialog(c.query, c.all(), {});
  const VectorXd x = bag_encode(ix, v.system, DialogAct::make_close());
  CHECK(x.segment(L.cs(0), L.beliefs).sum() == 0.0);
  CHECK(x.segment(L.act_belief(0), L.beliefs).sum() == 0.0);
  CHECK(x.segment(L.claim_atom(0), L.atoms).sum() == 0.0);
  CHECK(x(L.kind(ActKind::Close)) == 1.0);
  CHECK(x(L.kind(ActKind::Assert)) == 0.0);
  CHECK(x.segment(L.own(0), L.beliefs).sum() == 13.0);
  CHECK(x(L.top(0)) == 1.0);
}

TEST_CASE("worked-example state sets exactly its member bits") {
  const Corpus c = shipped();
  CorpusIndex ix(c);
  const DialogState s = table_state();
  for (const auto& act : legal_moves(s).all()) check_membership(ix, s, act);
}

TEST_CASE("property: bag bits mirror set membership on reachable states") {
  const Corpus c = shipped();
  CorpusIndex ix(c);
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    ReachableSample s = sample_reachable(c, rng);
    check_membership(ix, s.view, s.act);
  }
}

TEST_CASE("mlp forward") {
  MlpParams z = MlpParams::zeros(10, 4, 3);
  CHECK(mlp_q(z, VectorXd::Ones(10)) == 0.0);
  Rng rng(2);
  MlpParams p = init_mlp(10, 6, 5, rng);
  for (auto& b : p.blocks())
    for (Eigen::Index k = 0; k < b.value->size(); ++k) b.value->data()[k] = rng.uniform(-1, 1);
  VectorXd x(10);
  for (int i = 0; i < 10; ++i) x(i) = (i % 3 == 0) ? 1.0 : 0.0;
  CHECK(mlp_q(p, x) == mlp_q(p, x));
  CHECK(mlp_q(p, x) == doctest::Approx(ref_mlp(p, x)).epsilon(1e-12));
  CHECK_THROWS_AS(mlp_q(p, VectorXd::Ones(9)), std::invalid_argument);
}

TEST_CASE("sparse network Q equals the dense encoding") {
  const Corpus c = shipped();
  auto ix = std::make_shared<const CorpusIndex>(c);
  Rng rng(5);
  BagMlpQ q(ix, 16, rng);
  for (auto& b : q.blocks())
    for (Eigen::Index k = 0; k < b.value->size(); ++k) b.value->data()[k] += rng.uniform(-0.3, 0.3);
  for (int i = 0; i < 50; ++i) {
    ReachableSample s = sample_reachable(c, rng);
    const double dense = mlp_q(q.params(), bag_encode(*ix, s.view, s.act));
    CHECK(q.q(ix->encode(s.view), ix->encode(s.act)) == doctest::Approx(dense).epsilon(1e-12));
    std::vector<double> many;
    const auto legal = legal_moves(s.view).all();
    q.q_many(ix->encode(s.view), ix->encode(legal), many);
    for (std::size_t k = 0; k < legal.size(); ++k)
      CHECK(many[k] == doctest::Approx(mlp_q(q.params(), bag_encode(*ix, s.view, legal[k]))).epsilon(1e-12));
  }
}

TEST_CASE("network initialization") {
  Rng a(3), b(3);
  MlpParams p = init_mlp(50, 64, 64, a), r = init_mlp(50, 64, 64, b);
  CHECK(p.W1 == r.W1);
  CHECK(p.W1.rows() == 64);
  CHECK(p.W2.rows() == 64);
  CHECK(p.W3.cols() == 64);
  CHECK(p.b1.norm() == 0.0);
  CHECK(p.W1.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 114));
  CHECK(p.W2.cwiseAbs().maxCoeff() <= std::sqrt(6.0 / 128));
}
