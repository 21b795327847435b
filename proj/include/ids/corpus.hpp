#pragma once

// Belief corpora, belief splits between the two participants, and scenario
// files for replaying fixed dialogs.

#include <cstdint>
#include <string>
#include <vector>

#include "ids/inference.hpp"
#include "ids/rng.hpp"

namespace ids {

struct Corpus {
  std::vector<Belief> domain;  // rules, canonical
  std::vector<Belief> state;   // ground conjunctions
  Query query;

  /// Domain beliefs first, then state beliefs, in file order.
  std::vector<Belief> beliefs() const;
  BeliefSet all() const { return BeliefSet(beliefs()); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Belief file with exactly one query line. Throws ParseError on syntax
/// errors and CorpusError for a missing/duplicate query or duplicates.
Corpus parse_corpus(std::string_view text, const ParseOptions& opts = {});
Corpus load_corpus(const std::string& path, const ParseOptions& opts = {});
std::string format_corpus(const Corpus& c);

/// Throws CorpusError unless the combined set is consistent and derives a
/// ground instance of the query.
void validate_corpus(const Corpus& c);

/// A ground instance of the query derivable from the whole corpus.
bool corpus_answerable(const Corpus& c);

enum class SplitMode { RB, UB, SB };
const char* to_string(SplitMode m);
SplitMode parse_split_mode(const std::string& s);

struct Scenario {
  BeliefSet sigma_sys;
  BeliefSet sigma_usr;
  Query query;
  SplitMode mode = SplitMode::RB;
  std::uint64_t seed = 0;
};

/// State beliefs go to either side with probability 1/2 each. Domain
/// beliefs: RB splits them the same way; UB gives all to the user, SB all
/// to the system. Draws happen in corpus order, state beliefs first.
Scenario generate_scenario(const Corpus& corpus, SplitMode mode, Rng& rng);

/// Text with `[system]`, `[user]` and `[query]` sections, one formula per line.
Scenario parse_scenario(std::string_view text, const ParseOptions& opts = {});
Scenario load_scenario(const std::string& path, const ParseOptions& opts = {});

std::string read_text_file(const std::string& path);

}  // namespace ids
