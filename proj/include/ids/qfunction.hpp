#pragma once

// Q-functions over state/act codes: the embedded model and the
// bag-of-formulae MLP, with cached forward passes and batch gradients.

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ids/bag_mlp.hpp"
#include "ids/embedding.hpp"
#include "ids/encoding.hpp"

namespace ids {

enum class Exec { Serial, Parallel };

struct Sample {
  const StateCode* state;
  const ActCode* act;
  double target;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QFunction {
 public:
  explicit QFunction(std::shared_ptr<const CorpusIndex> index) : index_(std::move(index)) {}
  virtual ~QFunction() = default;

  virtual std::string model() const = 0;
  virtual std::unique_ptr<QFunction> clone() const = 0;
  virtual std::vector<ParamRef> blocks() = 0;
  virtual double default_learning_rate() const = 0;

  /// Recomputes cached activations; call after changing parameters.
  virtual void refresh() = 0;

  virtual double q(const StateCode& s, const ActCode& a) const = 0;
  virtual void q_many(const StateCode& s, const std::vector<ActCode>& acts,
                      std::vector<double>& out) const;

  /// Gradient of sum_i upstream[i] * Q(batch[i]), one matrix per block.
  /// Each sample's gradient is formed on its own and the results are added
  /// in batch order, so both execution modes give identical bits.
  virtual std::vector<Eigen::MatrixXd> gradient(const std::vector<Sample>& batch,
                                                const std::vector<double>& upstream,
                                                Exec exec) const = 0;

  const CorpusIndex& index() const { return *index_; }
  std::shared_ptr<const CorpusIndex> index_ptr() const { return index_; }

 protected:
  std::shared_ptr<const CorpusIndex> index_;
};

/// One plain SGD step on mean (Q - target)^2. Returns the loss before the
/// step; throws TrainingError if it is not finite.
double sgd_step(QFunction& q, const std::vector<Sample>& batch, double lr, Exec exec = Exec::Serial);

class EmbeddedQ : public QFunction {
 public:
  EmbeddedQ(std::shared_ptr<const CorpusIndex> index, int d, int d_lin, Rng& rng);
  EmbeddedQ(std::shared_ptr<const CorpusIndex> index, EmbParams params);

  std::string model() const override { return "embedded"; }
  std::unique_ptr<QFunction> clone() const override { return std::make_unique<EmbeddedQ>(*this); }
  std::vector<ParamRef> blocks() override { return p_.blocks(); }
  double default_learning_rate() const override { return 3e-3; }
  void refresh() override;
  double q(const StateCode& s, const ActCode& a) const override;
  void q_many(const StateCode& s, const std::vector<ActCode>& acts,
              std::vector<double>& out) const override;
  std::vector<Eigen::MatrixXd> gradient(const std::vector<Sample>& batch,
                                        const std::vector<double>& upstream,
                                        Exec exec) const override;

  const EmbParams& params() const { return p_; }
  EmbParams& params() { return p_; }
  const Vocab& vocab() const { return vocab_; }

  /// Vocabulary and dims that a corpus index implies.
  static Vocab vocab_for(const CorpusIndex& ix) { return Vocab::from_index(ix); }
  static Dims dims_for(const Vocab& vocab, int d, int d_lin);

 private:
  struct SampleGrad;
  void build_trees();
  Eigen::VectorXd state_input(const StateCode& s) const;
  Eigen::VectorXd act_formula(const ActCode& a, std::vector<Eigen::VectorXd>* chain) const;
  SampleGrad sample_gradient(const Sample& smp, double upstream) const;

  Vocab vocab_;
  EmbParams p_;
  std::vector<FormulaTree> belief_trees_, atom_trees_;
  std::vector<Tape> belief_tapes_, atom_tapes_;
  Eigen::MatrixXd belief_vec_, atom_vec_, store_vec_;  // one column per formula
};

class BagMlpQ : public QFunction {
 public:
  BagMlpQ(std::shared_ptr<const CorpusIndex> index, int hidden, Rng& rng);
  BagMlpQ(std::shared_ptr<const CorpusIndex> index, MlpParams params);

  std::string model() const override { return "bagmlp"; }
  std::unique_ptr<QFunction> clone() const override { return std::make_unique<BagMlpQ>(*this); }
  std::vector<ParamRef> blocks() override { return p_.blocks(); }
  double default_learning_rate() const override { return 1e-3; }
  void refresh() override {}
  double q(const StateCode& s, const ActCode& a) const override;
  void q_many(const StateCode& s, const std::vector<ActCode>& acts,
              std::vector<double>& out) const override;
  std::vector<Eigen::MatrixXd> gradient(const std::vector<Sample>& batch,
                                        const std::vector<double>& upstream,
                                        Exec exec) const override;

  const MlpParams& params() const { return p_; }
  MlpParams& params() { return p_; }
  const BagLayout& layout() const { return layout_; }

 private:
  struct SampleGrad;
  double from_pre(const Eigen::VectorXd& pre1) const;
  SampleGrad sample_gradient(const Sample& smp, double upstream) const;

  BagLayout layout_;
  MlpParams p_;
};

}  // namespace ids
