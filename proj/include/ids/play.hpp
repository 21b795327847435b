#pragma once

// Terminal sessions where a person plays one side of a dialog against a
// policy or the simulated user.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ids/evaluation.hpp"

namespace ids {

struct PlayOptions {
  Participant human = Participant::User;
  int turn_cap = 40;
  std::uint64_t seed = 1;
};

struct PlayResult {
  std::vector<Event> transcript;
  std::optional<Outcome> outcome;  // empty if input ended first
};

/// Prints the agenda, the commitment store and the human's numbered legal
/// moves before each human act and reads a number from `in`; anything else
/// reprompts and end of input stops the session. The other side is played
/// by `machine`, which sees only its own view. The system opens.
PlayResult play_session(const Scenario& scenario, const Policy& machine, const PlayOptions& opts,
                        std::istream& in, std::ostream& out);

/// One formatted event per line.
std::string format_transcript(const std::vector<Event>& events);

}  // namespace ids
