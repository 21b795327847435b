#include "ids/embedding.hpp"

#include <algorithm>
#include <set>

namespace ids {

using Eigen::MatrixXd;
using Eigen::VectorXd;

Vocab::Vocab(std::vector<std::string> predicates, std::vector<std::string> args)
    : predicates_(std::move(predicates)), args_(std::move(args)) {
  std::sort(predicates_.begin(), predicates_.end());
  predicates_.erase(std::unique(predicates_.begin(), predicates_.end()), predicates_.end());
  std::sort(args_.begin(), args_.end());
  args_.erase(std::unique(args_.begin(), args_.end()), args_.end());
  for (std::size_t i = 0; i < predicates_.size(); ++i) pred_ids_[predicates_[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < args_.size(); ++i) arg_ids_[args_[i]] = static_cast<int>(i);
}

namespace {

// Negation is not part of the one-hot input; a negated literal uses its
// own predicate symbol.
std::string predicate_symbol(const Atom& a) { return a.positive ? a.predicate : "!" + a.predicate; }

}  // namespace

Vocab Vocab::from_atoms(const std::vector<Atom>& atoms) {
  std::set<std::string> preds, args;
  for (const auto& raw : atoms) {
    Atom a = canonicalize(raw);
    preds.insert(predicate_symbol(a));
    for (const auto& t : a.args) args.insert(t.name);
  }
  return Vocab({preds.begin(), preds.end()}, {args.begin(), args.end()});
}

Vocab Vocab::from_index(const CorpusIndex& ix) {
  // Index atoms are canonical one by one; belief atoms keep the variable
  // names of their (canonical) formula.
  std::vector<Atom> atoms = ix.atoms();
  std::set<std::string> preds, args;
  for (const auto& b : ix.beliefs()) {
    atoms.insert(atoms.end(), b.antecedent.begin(), b.antecedent.end());
    atoms.insert(atoms.end(), b.consequent.begin(), b.consequent.end());
  }
  for (const auto& a : atoms) {
    preds.insert(predicate_symbol(a));
    for (const auto& t : a.args) args.insert(t.name);
  }
  return Vocab({preds.begin(), preds.end()}, {args.begin(), args.end()});
}

int Vocab::predicate(const std::string& name) const {
  auto it = pred_ids_.find(name);
  if (it == pred_ids_.end()) throw EncodingError("unknown predicate: " + name);
  return it->second;
}

int Vocab::arg(const std::string& name) const {
  auto it = arg_ids_.find(name);
  if (it == arg_ids_.end()) throw EncodingError("unknown argument symbol: " + name);
  return it->second;
}

// ---------------------------------------------------------------------------
// Trees

namespace {

int add_atom(FormulaTree& t, const Atom& a, const Vocab& vocab) {
  TreeNode n;
  n.kind = TreeNode::Kind::Atom;
  n.predicate = vocab.predicate(predicate_symbol(a));
  for (const auto& arg : a.args) n.args.push_back(vocab.arg(arg.name));
  t.nodes.push_back(std::move(n));
  return static_cast<int>(t.nodes.size()) - 1;
}

int add_conjunction(FormulaTree& t, const std::vector<Atom>& atoms, const Vocab& vocab) {
  if (atoms.empty()) throw EncodingError("empty conjunction");
  int acc = add_atom(t, atoms[0], vocab);
  for (std::size_t i = 1; i < atoms.size(); ++i) {
    int right = add_atom(t, atoms[i], vocab);
    TreeNode n;
    n.kind = TreeNode::Kind::And;
    n.left = acc;
    n.right = right;
    t.nodes.push_back(n);
    acc = static_cast<int>(t.nodes.size()) - 1;
  }
  return acc;
}

std::vector<Atom> canonical_conjunction(const std::vector<Atom>& atoms) {
  return canonicalize(Query{atoms}).atoms;
}

}  // namespace

FormulaTree build_tree(const Belief& raw, const Vocab& vocab) {
  Belief b = canonicalize(raw);
  FormulaTree t;
  int body = add_conjunction(t, b.antecedent, vocab);
  if (b.is_domain()) {
    int head = add_atom(t, b.head(), vocab);
    TreeNode n;
    n.kind = TreeNode::Kind::Imp;
    n.left = body;
    n.right = head;
    t.nodes.push_back(n);
  }
  return t;
}

FormulaTree build_tree(const std::vector<Atom>& conjunction, const Vocab& vocab) {
  FormulaTree t;
  add_conjunction(t, canonical_conjunction(conjunction), vocab);
  return t;
}

FormulaTree build_tree(const Atom& a, const Vocab& vocab) {
  FormulaTree t;
  add_atom(t, canonicalize(a), vocab);
  return t;
}

// ---------------------------------------------------------------------------
// Parameters

EmbParams EmbParams::zeros(const Dims& dims) {
  EmbParams p;
  p.dims = dims;
  const int d = dims.d, dl = dims.d_lin;
  p.W_pre = MatrixXd::Zero(d, dims.d_pre);
  p.W_arg = MatrixXd::Zero(d, dims.slots * dims.d_arg);
  p.W_and = MatrixXd::Zero(d, 2 * d);
  p.W_imp = MatrixXd::Zero(d, 2 * d);
  p.L_ds = MatrixXd::Zero(dl, 3 * d);
  p.b_ds = MatrixXd::Zero(dl, 1);
  p.L_da = MatrixXd::Zero(dl, d + 1);
  p.b_da = MatrixXd::Zero(dl, 1);
  p.w_out = MatrixXd::Zero(1, 2 * dl + 1);
  p.b_out = MatrixXd::Zero(1, 1);
  return p;
}

std::vector<ParamRef> EmbParams::blocks() {
  return {{"W_pre", &W_pre}, {"W_arg", &W_arg}, {"W_and", &W_and}, {"W_imp", &W_imp},
          {"L_ds", &L_ds},   {"b_ds", &b_ds},   {"L_da", &L_da},   {"b_da", &b_da},
          {"w_out", &w_out}, {"b_out", &b_out}};
}

EmbParams init_params(const Dims& dims, Rng& rng) {
  EmbParams p = EmbParams::zeros(dims);
  for (auto* m : {&p.W_pre, &p.W_arg, &p.W_and, &p.W_imp, &p.L_ds, &p.L_da, &p.w_out})
    glorot_fill(*m, rng);
  return p;
}

// ---------------------------------------------------------------------------
// Forward / backward over one formula

VectorXd embed_atom(const EmbParams& p, const TreeNode& atom) {
  if (static_cast<int>(atom.args.size()) > p.dims.slots)
    throw EncodingError("atom arity exceeds the number of argument slots");
  VectorXd pre = p.W_pre.col(atom.predicate);
  for (std::size_t s = 0; s < atom.args.size(); ++s)
    pre += p.W_arg.col(static_cast<Eigen::Index>(s) * p.dims.d_arg + atom.args[s]);
  return sigmoid(pre);
}

VectorXd compose(const EmbParams& p, TreeNode::Kind kind, const VectorXd& v1, const VectorXd& v2) {
  const MatrixXd& W = kind == TreeNode::Kind::Imp ? p.W_imp : p.W_and;
  const int d = p.dims.d;
  return sigmoid(W.leftCols(d) * v1 + W.rightCols(d) * v2);
}

VectorXd embed_formula(const EmbParams& p, const FormulaTree& t, Tape& tape) {
  tape.values.resize(t.nodes.size());
  for (std::size_t i = 0; i < t.nodes.size(); ++i) {
    const TreeNode& n = t.nodes[i];
    tape.values[i] = n.kind == TreeNode::Kind::Atom
                         ? embed_atom(p, n)
                         : compose(p, n.kind, tape.values[n.left], tape.values[n.right]);
  }
  return tape.values.back();
}

VectorXd embed_formula(const EmbParams& p, const FormulaTree& t) {
  Tape tape;
  return embed_formula(p, t, tape);
}

void backprop_formula(const EmbParams& p, const FormulaTree& t, const Tape& tape,
                      const VectorXd& grad_root, EmbParams& g) {
  const int d = p.dims.d;
  std::vector<VectorXd> grads(t.nodes.size(), VectorXd::Zero(d));
  grads.back() = grad_root;
  for (std::size_t k = t.nodes.size(); k-- > 0;) {
    const TreeNode& n = t.nodes[k];
    const VectorXd& v = tape.values[k];
    // Through the sigmoid: dv/dpre = v (1 - v).
    VectorXd dpre = grads[k].array() * v.array() * (1.0 - v.array());
    if (n.kind == TreeNode::Kind::Atom) {
      g.W_pre.col(n.predicate) += dpre;
      for (std::size_t s = 0; s < n.args.size(); ++s)
        g.W_arg.col(static_cast<Eigen::Index>(s) * p.dims.d_arg + n.args[s]) += dpre;
      continue;
    }
    const MatrixXd& W = n.kind == TreeNode::Kind::Imp ? p.W_imp : p.W_and;
    MatrixXd& gW = n.kind == TreeNode::Kind::Imp ? g.W_imp : g.W_and;
    gW.leftCols(d) += dpre * tape.values[n.left].transpose();
    gW.rightCols(d) += dpre * tape.values[n.right].transpose();
    grads[n.left] += W.leftCols(d).transpose() * dpre;
    grads[n.right] += W.rightCols(d).transpose() * dpre;
  }
}

// ---------------------------------------------------------------------------
// Dialog states and acts, evaluated directly from the views

namespace {

struct Group {
  std::vector<FormulaTree> trees;
  std::vector<Tape> tapes;
  VectorXd sum;

  void forward(const EmbParams& p) {
    sum = VectorXd::Zero(p.dims.d);
    tapes.resize(trees.size());
    for (std::size_t i = 0; i < trees.size(); ++i) sum += embed_formula(p, trees[i], tapes[i]);
  }
  void backward(const EmbParams& p, const VectorXd& grad, EmbParams& g) const {
    for (std::size_t i = 0; i < trees.size(); ++i) backprop_formula(p, trees[i], tapes[i], grad, g);
  }
};

struct Forward {
  Group own, cs, top, act;
  double close = 0;
  VectorXd x_ds, v_ds, x_da, v_da, z;
  double q = 0;
};

Group belief_group(const BeliefSet& bs, const Vocab& vocab) {
  Group g;
  for (const auto& b : bs) g.trees.push_back(build_tree(b, vocab));
  return g;
}

void state_part(const EmbParams& p, const DialogState& view, const Vocab& vocab, Forward& f) {
  const int d = p.dims.d;
  f.own = belief_group(view.own_beliefs, vocab);
  f.cs = belief_group(view.cs, vocab);
  if (const QueryStore* top = view.top())
    for (const auto& a : top->atoms) f.top.trees.push_back(build_tree(a, vocab));
  f.own.forward(p);
  f.cs.forward(p);
  f.top.forward(p);
  f.x_ds.resize(3 * d);
  f.x_ds << f.own.sum, f.cs.sum, f.top.sum;
  f.v_ds = p.L_ds * f.x_ds + p.b_ds.col(0);
}

void act_part(const EmbParams& p, const DialogAct& act, const Vocab& vocab, Forward& f) {
  const int d = p.dims.d;
  switch (act.kind) {
    case ActKind::Assert:
      f.act = belief_group(act.argument.support, vocab);
      f.act.trees.push_back(build_tree(act.argument.claim, vocab));
      break;
    case ActKind::Open: f.act.trees.push_back(build_tree(act.agenda, vocab)); break;
    case ActKind::Close: break;
  }
  f.act.forward(p);
  f.close = act.is_close() ? 1.0 : 0.0;
  f.x_da.resize(d + 1);
  f.x_da << f.act.sum, f.close;
  f.v_da = p.L_da * f.x_da + p.b_da.col(0);
}

Forward forward(const EmbParams& p, const DialogState& view, const DialogAct& act,
                const Vocab& vocab) {
  Forward f;
  state_part(p, view, vocab, f);
  act_part(p, act, vocab, f);
  const int dl = p.dims.d_lin;
  f.z.resize(2 * dl + 1);
  f.z << f.v_ds, f.v_da, f.close;
  f.q = (p.w_out * f.z)(0, 0) + p.b_out(0, 0);
  return f;
}

}  // namespace

VectorXd embed_state(const EmbParams& p, const DialogState& view, const Vocab& vocab) {
  Forward f;
  state_part(p, view, vocab, f);
  return f.v_ds;
}

VectorXd embed_act(const EmbParams& p, const DialogAct& act, const Vocab& vocab) {
  Forward f;
  act_part(p, act, vocab, f);
  return f.v_da;
}

double q_value(const EmbParams& p, const DialogState& view, const DialogAct& act,
               const Vocab& vocab) {
  return forward(p, view, act, vocab).q;
}

void q_gradient(const EmbParams& p, const DialogState& view, const DialogAct& act,
                const Vocab& vocab, double upstream, EmbParams& g) {
  const Forward f = forward(p, view, act, vocab);
  const int d = p.dims.d, dl = p.dims.d_lin;
  g.b_out(0, 0) += upstream;
  g.w_out += upstream * f.z.transpose();
  VectorXd dz = upstream * p.w_out.row(0).transpose();
  VectorXd dv_ds = dz.head(dl), dv_da = dz.segment(dl, dl);
  g.L_ds += dv_ds * f.x_ds.transpose();
  g.b_ds.col(0) += dv_ds;
  g.L_da += dv_da * f.x_da.transpose();
  g.b_da.col(0) += dv_da;
  VectorXd dx_ds = p.L_ds.transpose() * dv_ds;
  VectorXd dx_da = p.L_da.transpose() * dv_da;
  f.own.backward(p, dx_ds.segment(0, d), g);
  f.cs.backward(p, dx_ds.segment(d, d), g);
  f.top.backward(p, dx_ds.segment(2 * d, d), g);
  f.act.backward(p, dx_da.head(d), g);
}

}  // namespace ids
