#pragma once

// Small fixed corpora and scenarios shared by the unit and acceptance tests.

#include "ids/corpus.hpp"

namespace ids::testing {

/// The system holds a fact that answers the query outright, plus a rule it
/// could open instead; the user holds the fact for the rule.
Corpus one_step_corpus();
Scenario one_step_scenario();

}  // namespace ids::testing
