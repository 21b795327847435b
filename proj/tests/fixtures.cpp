#include "fixtures.hpp"

namespace ids::testing {

Corpus one_step_corpus() {
  return parse_corpus(
      "Lead(X) -> Answer(X)\n"
      "Answer(a)\n"
      "Lead(b)\n"
      "-> Answer(X)\n");
}

Scenario one_step_scenario() {
  const Corpus c = one_step_corpus();
  Scenario s;
  s.sigma_sys = BeliefSet{c.domain[0], c.state[0]};
  s.sigma_usr = BeliefSet{c.state[1]};
  s.query = c.query;
  return s;
}

}  // namespace ids::testing
