#pragma once

// Bag-of-formulae encoding of (state, act) pairs and the feed-forward
// network that scores them.

#include <Eigen/Dense>
#include <vector>

#include "ids/encoding.hpp"
#include "ids/params.hpp"

namespace ids {

/// Input layout over a corpus index, one indicator per slot:
///   own beliefs | CS beliefs | top store | act beliefs | claim atoms | Assert, Open, Close
struct BagLayout {
  int beliefs = 0, stores = 0, atoms = 0;

  explicit BagLayout(const CorpusIndex& ix)
      : beliefs(static_cast<int>(ix.beliefs().size())),
        stores(static_cast<int>(ix.stores().size())),
        atoms(static_cast<int>(ix.atoms().size())) {}

  int own(int id) const { return id; }
  int cs(int id) const { return beliefs + id; }
  int top(int id) const { return 2 * beliefs + id; }
  int act_belief(int id) const { return 2 * beliefs + stores + id; }
  int claim_atom(int id) const { return 3 * beliefs + stores + id; }
  int kind(ActKind k) const { return 3 * beliefs + stores + atoms + static_cast<int>(k); }
  int size() const { return 3 * beliefs + stores + atoms + 3; }
};

/// Indices of the one bits of the state part and of the act part.
std::vector<int> active_state_inputs(const BagLayout& layout, const StateCode& s);
std::vector<int> active_act_inputs(const BagLayout& layout, const ActCode& a);

/// Dense binary input vector of `view` and `act`.
Eigen::VectorXd bag_encode(const CorpusIndex& ix, const DialogState& view, const DialogAct& act);

struct MlpParams {
  Eigen::MatrixXd W1, b1, W2, b2, W3, b3;

  static MlpParams zeros(int inputs, int hidden1, int hidden2);
  std::vector<ParamRef> blocks();
  int inputs() const { return static_cast<int>(W1.cols()); }
};

/// Weight matrices uniform in +-sqrt(6 / (fan_in + fan_out)); biases zero.
MlpParams init_mlp(int inputs, int hidden1, int hidden2, Rng& rng);

/// sigmoid hidden layers, linear output. Throws std::invalid_argument on a
/// length mismatch.
double mlp_q(const MlpParams& p, const Eigen::VectorXd& x);

}  // namespace ids
