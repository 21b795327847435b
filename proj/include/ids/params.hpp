#pragma once

// Named parameter blocks shared by the models, the optimizer, gradient
// checks and checkpoints.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ids/rng.hpp"

namespace ids {

struct ParamRef {
  std::string name;
  Eigen::MatrixXd* value;
};

/// Uniform in [-s, s] with s = sqrt(6 / (rows + cols)), row-major draw order.
inline void glorot_fill(Eigen::MatrixXd& m, Rng& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rng.uniform(-s, s);
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Eigen::VectorXd sigmoid(const Eigen::VectorXd& x) {
  return x.unaryExpr([](double v) { return sigmoid(v); });
}

inline std::size_t parameter_count(const std::vector<ParamRef>& blocks) {
  std::size_t n = 0;
  for (const auto& b : blocks) n += static_cast<std::size_t>(b.value->size());
  return n;
}

}  // namespace ids
