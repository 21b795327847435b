#pragma once

// Recursive embedding of formulas and the embedded Q-function over dialog
// states and acts, with reverse-mode gradients.

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "ids/dialog.hpp"
#include "ids/encoding.hpp"
#include "ids/params.hpp"

namespace ids {

/// Symbol tables for the one-hot predicate and argument inputs. Symbols
/// are sorted, so the same formulas always give the same indices.
class Vocab {
 public:
  Vocab() = default;
  Vocab(std::vector<std::string> predicates, std::vector<std::string> args);
  /// Predicates and argument symbols of every belief and atom of the index.
  static Vocab from_index(const CorpusIndex& ix);
  static Vocab from_atoms(const std::vector<Atom>& atoms);

  int predicate(const std::string& name) const;  // throws EncodingError
  int arg(const std::string& name) const;        // throws EncodingError
  const std::vector<std::string>& predicates() const { return predicates_; }
  const std::vector<std::string>& args() const { return args_; }

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.predicates_ == b.predicates_ && a.args_ == b.args_;
  }

 private:
  std::vector<std::string> predicates_, args_;
  std::map<std::string, int> pred_ids_, arg_ids_;
};

struct Dims {
  int d = 5;
  int d_pre = 1;
  int d_arg = 1;
  int slots = 3;  // maximum arity
  int d_lin = 10;

  friend bool operator==(const Dims&, const Dims&) = default;
};

struct TreeNode {
  enum class Kind { Atom, And, Imp };
  Kind kind = Kind::Atom;
  int predicate = -1;      // Atom
  std::vector<int> args;   // Atom: argument index per slot
  int left = -1, right = -1;  // And / Imp: node indices
};

/// Nodes in post-order; the root is the last node.
struct FormulaTree {
  std::vector<TreeNode> nodes;
  const TreeNode& root() const { return nodes.back(); }
};

/// Conjunctions fold left; a rule becomes Imp(body, head). Variables are
/// canonicalized per formula before lookup.
FormulaTree build_tree(const Belief& b, const Vocab& vocab);
FormulaTree build_tree(const std::vector<Atom>& conjunction, const Vocab& vocab);
FormulaTree build_tree(const Atom& a, const Vocab& vocab);

struct EmbParams {
  Dims dims;
  Eigen::MatrixXd W_pre, W_arg, W_and, W_imp;  // formula embedding
  Eigen::MatrixXd L_ds, b_ds;                  // state block: d_lin x 3d, d_lin x 1
  Eigen::MatrixXd L_da, b_da;                  // act block: d_lin x (d+1), d_lin x 1
  Eigen::MatrixXd w_out, b_out;                // 1 x (2 d_lin + 1), 1 x 1

  static EmbParams zeros(const Dims& dims);
  std::vector<ParamRef> blocks();
};

/// Weight matrices uniform in +-sqrt(6 / (fan_in + fan_out)); biases zero.
EmbParams init_params(const Dims& dims, Rng& rng);

Eigen::VectorXd embed_atom(const EmbParams& p, const TreeNode& atom);
Eigen::VectorXd compose(const EmbParams& p, TreeNode::Kind kind, const Eigen::VectorXd& v1,
                        const Eigen::VectorXd& v2);

/// Node values of the last forward pass.
struct Tape {
  std::vector<Eigen::VectorXd> values;
};

Eigen::VectorXd embed_formula(const EmbParams& p, const FormulaTree& t);
Eigen::VectorXd embed_formula(const EmbParams& p, const FormulaTree& t, Tape& tape);

/// Adds d(root . grad_root)/d(params) to `grads`.
void backprop_formula(const EmbParams& p, const FormulaTree& t, const Tape& tape,
                      const Eigen::VectorXd& grad_root, EmbParams& grads);

/// State vector from own beliefs, CS and top-store atoms.
Eigen::VectorXd embed_state(const EmbParams& p, const DialogState& view, const Vocab& vocab);
/// Act vector from its formulas and the Close indicator.
Eigen::VectorXd embed_act(const EmbParams& p, const DialogAct& act, const Vocab& vocab);
double q_value(const EmbParams& p, const DialogState& view, const DialogAct& act,
               const Vocab& vocab);
/// Adds upstream * dQ/d(params) to `grads`.
void q_gradient(const EmbParams& p, const DialogState& view, const DialogAct& act,
                const Vocab& vocab, double upstream, EmbParams& grads);

}  // namespace ids
