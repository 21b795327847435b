#pragma once

// Text checkpoints holding a trained Q-function together with the corpus it
// was trained on, so the belief and atom indexing can be rebuilt exactly.

#include <memory>
#include <stdexcept>
#include <string>

#include "ids/corpus.hpp"
#include "ids/qfunction.hpp"

namespace ids {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadedModel {
  Corpus corpus;
  std::shared_ptr<QFunction> q;
};

/// Values are written with %.17g, so loading restores every bit.
std::string format_checkpoint(const QFunction& q, const Corpus& corpus);
void save_checkpoint(const std::string& path, const QFunction& q, const Corpus& corpus);

LoadedModel parse_checkpoint(const std::string& text);
LoadedModel load_checkpoint(const std::string& path);

}  // namespace ids
