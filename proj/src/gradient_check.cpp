#include "ids/gradient_check.hpp"

#include <algorithm>

#include "ids/qfunction.hpp"

namespace ids {

ReachableSample sample_reachable(const Corpus& corpus, Rng& rng, int max_steps) {
  for (;;) {
    Scenario sc = generate_scenario(corpus, SplitMode::RB, rng);
    DialogViews v = init_dialog(sc.query, sc.sigma_sys, sc.sigma_usr, Participant::System);
    const int steps = static_cast<int>(rng.index(static_cast<std::size_t>(max_steps) + 1));
    bool ended = false;
    for (int i = 0; i < steps && !ended; ++i) {
      const Participant actor = v.system.actor_to_move;
      std::vector<DialogAct> all = legal_moves(v.of(actor)).all();
      apply_act(v, all[rng.index(all.size())], actor);
      ended = is_terminal(v.system, 1 << 20).has_value();
    }
    if (ended) continue;
    const DialogState& view = v.of(v.system.actor_to_move);
    std::vector<DialogAct> all = legal_moves(view).all();
    return {view, all[rng.index(all.size())]};
  }
}

double GradCheckReport::max_rel_error() const {
  double m = 0;
  for (const auto& t : trials) m = std::max(m, t.max_rel_error);
  return m;
}

bool GradCheckReport::full_coverage() const {
  bool a = false, c = false, i = false, s = false, l = false, m = false;
  for (const auto& t : trials) {
    a |= t.atom;
    c |= t.conj;
    i |= t.imp;
    s |= t.sum;
    l |= t.lin;
    m |= t.mlp;
  }
  return a && c && i && s && l && m;
}

namespace {

bool has_rule(const std::vector<int>& ids, const CorpusIndex& ix) {
  return std::any_of(ids.begin(), ids.end(), [&](int id) { return ix.beliefs()[id].is_domain(); });
}

bool has_conjunction(const std::vector<int>& ids, const CorpusIndex& ix) {
  return std::any_of(ids.begin(), ids.end(), [&](int id) { return ix.beliefs()[id].antecedent.size() > 1; });
}

}  // namespace

GradCheckReport check_gradients(const Corpus& corpus, const GradCheckConfig& cfg) {
  auto ix = std::make_shared<const CorpusIndex>(corpus);
  GradCheckReport report;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(trial)));
    std::unique_ptr<QFunction> q;
    if (trial % 2 == 0)
      q = std::make_unique<EmbeddedQ>(ix, 2 + static_cast<int>(rng.index(4)), 3 + static_cast<int>(rng.index(6)), rng);
    else
      q = std::make_unique<BagMlpQ>(ix, 4 + static_cast<int>(rng.index(12)), rng);
    for (auto& b : q->blocks())
      for (Eigen::Index k = 0; k < b.value->size(); ++k) b.value->data()[k] = rng.uniform(-1.0, 1.0);
    q->refresh();

    ReachableSample smp = sample_reachable(corpus, rng);
    const StateCode s = ix->encode(smp.view);
    const ActCode a = ix->encode(smp.act);

    GradCheckTrial t;
    t.model = q->model();
    if (t.model == "embedded") {
      std::vector<int> formulas = s.own;
      formulas.insert(formulas.end(), s.cs.begin(), s.cs.end());
      formulas.insert(formulas.end(), a.beliefs.begin(), a.beliefs.end());
      t.atom = !formulas.empty() || s.top >= 0;
      t.conj = has_conjunction(formulas, *ix) || a.claim.size() > 1;
      t.imp = has_rule(formulas, *ix);
      t.sum = s.own.size() + s.cs.size() > 1;
      t.lin = true;
    } else {
      t.mlp = true;
    }

    const std::vector<Eigen::MatrixXd> analytic = q->gradient({{&s, &a, 0.0}}, {1.0}, Exec::Serial);
    std::vector<ParamRef> blocks = q->blocks();
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      Eigen::MatrixXd& m = *blocks[bi].value;
      Eigen::MatrixXd numeric(m.rows(), m.cols());
      for (Eigen::Index k = 0; k < m.size(); ++k) {
        const double orig = m.data()[k];
        m.data()[k] = orig + cfg.h;
        q->refresh();
        const double up = q->q(s, a);
        m.data()[k] = orig - cfg.h;
        q->refresh();
        const double down = q->q(s, a);
        m.data()[k] = orig;
        numeric.data()[k] = (up - down) / (2 * cfg.h);
      }
      q->refresh();
      const double na = analytic[bi].norm(), nn = numeric.norm();
      if (na == 0.0 && nn == 0.0) continue;
      const double err = (analytic[bi] - numeric).norm() / std::max(na, nn);
      if (err > t.max_rel_error) {
        t.max_rel_error = err;
        t.worst_block = blocks[bi].name;
      }
    }
    report.trials.push_back(t);
  }
  return report;
}

}  // namespace ids
