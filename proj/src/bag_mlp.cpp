#include "ids/bag_mlp.hpp"

#include <stdexcept>

namespace ids {

std::vector<int> active_state_inputs(const BagLayout& layout, const StateCode& s) {
  std::vector<int> out;
  out.reserve(s.own.size() + s.cs.size() + 1);
  for (int id : s.own) out.push_back(layout.own(id));
  for (int id : s.cs) out.push_back(layout.cs(id));
  if (s.top >= 0) out.push_back(layout.top(s.top));
  return out;
}

std::vector<int> active_act_inputs(const BagLayout& layout, const ActCode& a) {
  std::vector<int> out;
  for (int id : a.beliefs) out.push_back(layout.act_belief(id));
  // A claim may not repeat an atom, so indicator bits suffice.
  for (int id : a.claim) out.push_back(layout.claim_atom(id));
  out.push_back(layout.kind(a.kind));
  return out;
}

Eigen::VectorXd bag_encode(const CorpusIndex& ix, const DialogState& view, const DialogAct& act) {
  BagLayout layout(ix);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(layout.size());
  for (int i : active_state_inputs(layout, ix.encode(view))) x(i) = 1.0;
  for (int i : active_act_inputs(layout, ix.encode(act))) x(i) = 1.0;
  return x;
}

MlpParams MlpParams::zeros(int inputs, int hidden1, int hidden2) {
  MlpParams p;
  p.W1 = Eigen::MatrixXd::Zero(hidden1, inputs);
  p.b1 = Eigen::MatrixXd::Zero(hidden1, 1);
  p.W2 = Eigen::MatrixXd::Zero(hidden2, hidden1);
  p.b2 = Eigen::MatrixXd::Zero(hidden2, 1);
  p.W3 = Eigen::MatrixXd::Zero(1, hidden2);
  p.b3 = Eigen::MatrixXd::Zero(1, 1);
  return p;
}

std::vector<ParamRef> MlpParams::blocks() {
  return {{"W1", &W1}, {"b1", &b1}, {"W2", &W2}, {"b2", &b2}, {"W3", &W3}, {"b3", &b3}};
}

MlpParams init_mlp(int inputs, int hidden1, int hidden2, Rng& rng) {
  MlpParams p = MlpParams::zeros(inputs, hidden1, hidden2);
  glorot_fill(p.W1, rng);
  glorot_fill(p.W2, rng);
  glorot_fill(p.W3, rng);
  return p;
}

double mlp_q(const MlpParams& p, const Eigen::VectorXd& x) {
  if (x.size() != p.W1.cols())
    throw std::invalid_argument("input length " + std::to_string(x.size()) + " does not match " +
                                std::to_string(p.W1.cols()));
  Eigen::VectorXd h1 = sigmoid(p.W1 * x + p.b1.col(0));
  Eigen::VectorXd h2 = sigmoid(p.W2 * h1 + p.b2.col(0));
  return (p.W3 * h2)(0, 0) + p.b3(0, 0);
}

}  // namespace ids
