#include "ids/qfunction.hpp"

#include <cmath>
#include <sstream>

namespace ids {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void QFunction::q_many(const StateCode& s, const std::vector<ActCode>& acts,
                       std::vector<double>& out) const {
  out.resize(acts.size());
  for (std::size_t i = 0; i < acts.size(); ++i) out[i] = q(s, acts[i]);
}

double sgd_step(QFunction& q, const std::vector<Sample>& batch, double lr, Exec exec) {
  if (batch.empty()) throw std::invalid_argument("sgd_step on an empty batch");
  const double n = static_cast<double>(batch.size());
  std::vector<double> upstream(batch.size());
  double loss = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double pred = q.q(*batch[i].state, *batch[i].act);
    const double err = pred - batch[i].target;
    if (!std::isfinite(err)) {
      std::ostringstream msg;
      msg << "non-finite TD error at batch index " << i << ": Q = " << pred
          << ", target = " << batch[i].target;
      throw TrainingError(msg.str());
    }
    loss += err * err;
    upstream[i] = 2.0 * err / n;
  }
  loss /= n;
  auto grads = q.gradient(batch, upstream, exec);
  auto blocks = q.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (!grads[b].allFinite()) throw TrainingError("non-finite gradient in block " + blocks[b].name);
    *blocks[b].value -= lr * grads[b];
  }
  q.refresh();
  return loss;
}

// ---------------------------------------------------------------------------
// EmbeddedQ

Dims EmbeddedQ::dims_for(const Vocab& vocab, int d, int d_lin) {
  Dims dims;
  dims.d = d;
  dims.d_lin = d_lin;
  dims.d_pre = static_cast<int>(vocab.predicates().size());
  dims.d_arg = static_cast<int>(vocab.args().size());
  dims.slots = ParseOptions{}.max_arity;
  return dims;
}

EmbeddedQ::EmbeddedQ(std::shared_ptr<const CorpusIndex> index, int d, int d_lin, Rng& rng)
    : QFunction(std::move(index)), vocab_(vocab_for(*index_)) {
  p_ = init_params(dims_for(vocab_, d, d_lin), rng);
  build_trees();
  refresh();
}

EmbeddedQ::EmbeddedQ(std::shared_ptr<const CorpusIndex> index, EmbParams params)
    : QFunction(std::move(index)), vocab_(vocab_for(*index_)), p_(std::move(params)) {
  Dims expect = dims_for(vocab_, p_.dims.d, p_.dims.d_lin);
  if (!(expect == p_.dims)) throw EncodingError("parameter shapes do not match the corpus vocabulary");
  build_trees();
  refresh();
}

void EmbeddedQ::build_trees() {
  for (const auto& b : index_->beliefs()) belief_trees_.push_back(build_tree(b, vocab_));
  for (const auto& a : index_->atoms()) atom_trees_.push_back(build_tree(a, vocab_));
}

void EmbeddedQ::refresh() {
  const int d = p_.dims.d;
  belief_tapes_.resize(belief_trees_.size());
  atom_tapes_.resize(atom_trees_.size());
  belief_vec_.resize(d, static_cast<Eigen::Index>(belief_trees_.size()));
  atom_vec_.resize(d, static_cast<Eigen::Index>(atom_trees_.size()));
  for (std::size_t i = 0; i < belief_trees_.size(); ++i)
    belief_vec_.col(i) = embed_formula(p_, belief_trees_[i], belief_tapes_[i]);
  for (std::size_t i = 0; i < atom_trees_.size(); ++i)
    atom_vec_.col(i) = embed_formula(p_, atom_trees_[i], atom_tapes_[i]);
  const auto& sa = index_->store_atoms();
  store_vec_ = MatrixXd::Zero(d, static_cast<Eigen::Index>(sa.size()));
  for (std::size_t s = 0; s < sa.size(); ++s)
    for (int a : sa[s]) store_vec_.col(s) += atom_vec_.col(a);
}

VectorXd EmbeddedQ::state_input(const StateCode& s) const {
  const int d = p_.dims.d;
  VectorXd x = VectorXd::Zero(3 * d);
  for (int id : s.own) x.segment(0, d) += belief_vec_.col(id);
  for (int id : s.cs) x.segment(d, d) += belief_vec_.col(id);
  if (s.top >= 0) x.segment(2 * d, d) = store_vec_.col(s.top);
  return x;
}

VectorXd EmbeddedQ::act_formula(const ActCode& a, std::vector<VectorXd>* chain) const {
  const int d = p_.dims.d;
  VectorXd f = VectorXd::Zero(d);
  switch (a.kind) {
    case ActKind::Assert: {
      for (int id : a.beliefs) f += belief_vec_.col(id);
      // The claim is a left-folded conjunction of its atoms.
      VectorXd c = atom_vec_.col(a.claim.at(0));
      if (chain) chain->push_back(c);
      for (std::size_t k = 1; k < a.claim.size(); ++k) {
        c = compose(p_, TreeNode::Kind::And, c, atom_vec_.col(a.claim[k]));
        if (chain) chain->push_back(c);
      }
      f += c;
      break;
    }
    case ActKind::Open: f = belief_vec_.col(a.beliefs.at(0)); break;
    case ActKind::Close: break;
  }
  return f;
}

void EmbeddedQ::q_many(const StateCode& s, const std::vector<ActCode>& acts,
                       std::vector<double>& out) const {
  const int d = p_.dims.d, dl = p_.dims.d_lin;
  const VectorXd v_ds = p_.L_ds * state_input(s) + p_.b_ds.col(0);
  const double state_term = p_.w_out.leftCols(dl).row(0).dot(v_ds) + p_.b_out(0, 0);
  out.resize(acts.size());
  VectorXd x_da(d + 1);
  for (std::size_t i = 0; i < acts.size(); ++i) {
    const double close = acts[i].kind == ActKind::Close ? 1.0 : 0.0;
    x_da << act_formula(acts[i], nullptr), close;
    const VectorXd v_da = p_.L_da * x_da + p_.b_da.col(0);
    out[i] = state_term + p_.w_out.middleCols(dl, dl).row(0).dot(v_da) + p_.w_out(0, 2 * dl) * close;
  }
}

double EmbeddedQ::q(const StateCode& s, const ActCode& a) const {
  std::vector<double> out;
  q_many(s, {a}, out);
  return out[0];
}

struct EmbeddedQ::SampleGrad {
  MatrixXd w_out, L_ds, b_ds, L_da, b_da, W_and;
  double b_out = 0;
  std::vector<std::pair<int, VectorXd>> formulas;  // belief id, or #beliefs + atom id
};

EmbeddedQ::SampleGrad EmbeddedQ::sample_gradient(const Sample& smp, double g) const {
  const int d = p_.dims.d, dl = p_.dims.d_lin;
  const int nb = static_cast<int>(belief_trees_.size());
  const StateCode& s = *smp.state;
  const ActCode& a = *smp.act;
  SampleGrad out;

  const VectorXd x_ds = state_input(s);
  const VectorXd v_ds = p_.L_ds * x_ds + p_.b_ds.col(0);
  std::vector<VectorXd> chain;
  const double close = a.kind == ActKind::Close ? 1.0 : 0.0;
  VectorXd x_da(d + 1);
  x_da << act_formula(a, &chain), close;
  const VectorXd v_da = p_.L_da * x_da + p_.b_da.col(0);
  VectorXd z(2 * dl + 1);
  z << v_ds, v_da, close;

  out.b_out = g;
  out.w_out = g * z.transpose();
  const VectorXd dv_ds = g * p_.w_out.leftCols(dl).row(0).transpose();
  const VectorXd dv_da = g * p_.w_out.middleCols(dl, dl).row(0).transpose();
  out.L_ds = dv_ds * x_ds.transpose();
  out.b_ds = dv_ds;
  out.L_da = dv_da * x_da.transpose();
  out.b_da = dv_da;
  out.W_and = MatrixXd::Zero(d, 2 * d);

  const VectorXd dx_ds = p_.L_ds.transpose() * dv_ds;
  for (int id : s.own) out.formulas.emplace_back(id, dx_ds.segment(0, d));
  for (int id : s.cs) out.formulas.emplace_back(id, dx_ds.segment(d, d));
  if (s.top >= 0)
    for (int atom : index_->store_atoms()[s.top]) out.formulas.emplace_back(nb + atom, dx_ds.segment(2 * d, d));

  const VectorXd dF = (p_.L_da.transpose() * dv_da).head(d);
  if (a.kind == ActKind::Open) out.formulas.emplace_back(a.beliefs.at(0), dF);
  if (a.kind == ActKind::Assert) {
    for (int id : a.beliefs) out.formulas.emplace_back(id, dF);
    VectorXd grad_c = dF;
    for (std::size_t k = a.claim.size(); k-- > 1;) {
      const VectorXd& c = chain[k];
      const VectorXd dpre = grad_c.array() * c.array() * (1.0 - c.array());
      const VectorXd atom = atom_vec_.col(a.claim[k]);
      out.W_and.leftCols(d) += dpre * chain[k - 1].transpose();
      out.W_and.rightCols(d) += dpre * atom.transpose();
      out.formulas.emplace_back(nb + a.claim[k], p_.W_and.rightCols(d).transpose() * dpre);
      grad_c = p_.W_and.leftCols(d).transpose() * dpre;
    }
    out.formulas.emplace_back(nb + a.claim.at(0), grad_c);
  }
  return out;
}

std::vector<MatrixXd> EmbeddedQ::gradient(const std::vector<Sample>& batch,
                                          const std::vector<double>& upstream, Exec exec) const {
  const int n = static_cast<int>(batch.size());
  std::vector<SampleGrad> per(batch.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) per[i] = sample_gradient(batch[i], upstream[i]);
  } else {
    for (int i = 0; i < n; ++i) per[i] = sample_gradient(batch[i], upstream[i]);
  }

  EmbParams g = EmbParams::zeros(p_.dims);
  const int nb = static_cast<int>(belief_trees_.size());
  MatrixXd formula_grad = MatrixXd::Zero(p_.dims.d, nb + static_cast<int>(atom_trees_.size()));
  std::vector<bool> touched(formula_grad.cols(), false);
  for (const auto& sg : per) {
    g.w_out += sg.w_out;
    g.b_out(0, 0) += sg.b_out;
    g.L_ds += sg.L_ds;
    g.b_ds += sg.b_ds;
    g.L_da += sg.L_da;
    g.b_da += sg.b_da;
    g.W_and += sg.W_and;
    for (const auto& [slot, v] : sg.formulas) {
      formula_grad.col(slot) += v;
      touched[slot] = true;
    }
  }
  for (int k = 0; k < formula_grad.cols(); ++k) {
    if (!touched[k]) continue;
    if (k < nb)
      backprop_formula(p_, belief_trees_[k], belief_tapes_[k], formula_grad.col(k), g);
    else
      backprop_formula(p_, atom_trees_[k - nb], atom_tapes_[k - nb], formula_grad.col(k), g);
  }
  std::vector<MatrixXd> out;
  for (const auto& b : g.blocks()) out.push_back(std::move(*b.value));
  return out;
}

// ---------------------------------------------------------------------------
// BagMlpQ

BagMlpQ::BagMlpQ(std::shared_ptr<const CorpusIndex> index, int hidden, Rng& rng)
    : QFunction(std::move(index)), layout_(*index_) {
  p_ = init_mlp(layout_.size(), hidden, hidden, rng);
}

BagMlpQ::BagMlpQ(std::shared_ptr<const CorpusIndex> index, MlpParams params)
    : QFunction(std::move(index)), layout_(*index_), p_(std::move(params)) {
  if (p_.inputs() != layout_.size())
    throw EncodingError("network input width does not match the corpus layout");
}

double BagMlpQ::from_pre(const VectorXd& pre1) const {
  VectorXd h1 = sigmoid(pre1 + p_.b1.col(0));
  VectorXd h2 = sigmoid(p_.W2 * h1 + p_.b2.col(0));
  return (p_.W3 * h2)(0, 0) + p_.b3(0, 0);
}

void BagMlpQ::q_many(const StateCode& s, const std::vector<ActCode>& acts,
                     std::vector<double>& out) const {
  VectorXd base = VectorXd::Zero(p_.W1.rows());
  for (int i : active_state_inputs(layout_, s)) base += p_.W1.col(i);
  out.resize(acts.size());
  for (std::size_t k = 0; k < acts.size(); ++k) {
    VectorXd pre = base;
    for (int i : active_act_inputs(layout_, acts[k])) pre += p_.W1.col(i);
    out[k] = from_pre(pre);
  }
}

double BagMlpQ::q(const StateCode& s, const ActCode& a) const {
  std::vector<double> out;
  q_many(s, {a}, out);
  return out[0];
}

struct BagMlpQ::SampleGrad {
  std::vector<int> active;
  VectorXd h1, h2, d1, d2;
  double g = 0;
};

BagMlpQ::SampleGrad BagMlpQ::sample_gradient(const Sample& smp, double g) const {
  SampleGrad out;
  out.g = g;
  out.active = active_state_inputs(layout_, *smp.state);
  for (int i : active_act_inputs(layout_, *smp.act)) out.active.push_back(i);
  VectorXd pre = VectorXd::Zero(p_.W1.rows());
  for (int i : out.active) pre += p_.W1.col(i);
  out.h1 = sigmoid(pre + p_.b1.col(0));
  out.h2 = sigmoid(p_.W2 * out.h1 + p_.b2.col(0));
  out.d2 = (g * p_.W3.row(0).transpose()).array() * out.h2.array() * (1.0 - out.h2.array());
  out.d1 = (p_.W2.transpose() * out.d2).array() * out.h1.array() * (1.0 - out.h1.array());
  return out;
}

std::vector<MatrixXd> BagMlpQ::gradient(const std::vector<Sample>& batch,
                                        const std::vector<double>& upstream, Exec exec) const {
  const int n = static_cast<int>(batch.size());
  std::vector<SampleGrad> per(batch.size());
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) per[i] = sample_gradient(batch[i], upstream[i]);
  } else {
    for (int i = 0; i < n; ++i) per[i] = sample_gradient(batch[i], upstream[i]);
  }
  MlpParams g = MlpParams::zeros(p_.inputs(), static_cast<int>(p_.W1.rows()),
                                 static_cast<int>(p_.W2.rows()));
  for (const auto& sg : per) {
    g.W3 += sg.g * sg.h2.transpose();
    g.b3(0, 0) += sg.g;
    g.W2 += sg.d2 * sg.h1.transpose();
    g.b2 += sg.d2;
    for (int i : sg.active) g.W1.col(i) += sg.d1;
    g.b1 += sg.d1;
  }
  std::vector<MatrixXd> out;
  for (const auto& b : g.blocks()) out.push_back(std::move(*b.value));
  return out;
}

}  // namespace ids
