#include "ids/play.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <string>

namespace ids {

namespace {

void show_state(const DialogState& view, std::ostream& out) {
  out << "\n-- turn " << view.turn_index + 1 << ", you are the " << to_string(view.owner) << "\n";
  out << "your beliefs: " << to_string(view.own_beliefs) << "\n";
  out << "commitment store: " << to_string(view.cs) << "\n";
  if (const QueryStore* top = view.top())
    out << "agenda (" << view.cqs.size() << " open): " << to_string(top->atoms) << "\n";
  else
    out << "agenda: none\n";
}

// Returns nullopt at end of input.
std::optional<std::size_t> read_choice(std::size_t n, std::istream& in, std::ostream& out) {
  std::string line;
  for (;;) {
    out << "choose 1-" << n << "> " << std::flush;
    if (!std::getline(in, line)) return std::nullopt;
    try {
      std::size_t used = 0;
      const long k = std::stol(line, &used);
      while (used < line.size() && std::isspace(static_cast<unsigned char>(line[used]))) ++used;
      if (used == line.size() && k >= 1 && static_cast<std::size_t>(k) <= n) return static_cast<std::size_t>(k - 1);
    } catch (const std::exception&) {
    }
    out << "not a move number\n";
  }
}

}  // namespace

PlayResult play_session(const Scenario& scenario, const Policy& machine, const PlayOptions& opts,
                        std::istream& in, std::ostream& out) {
  PlayResult result;
  DialogViews v = init_dialog(scenario.query, scenario.sigma_sys, scenario.sigma_usr, Participant::System);
  Rng rng(opts.seed);
  out << "query: " << to_string(scenario.query) << "\n";
  for (;;) {
    if (auto done = is_terminal(v.system, opts.turn_cap)) {
      result.outcome = done;
      out << "\ndialog over: " << to_string(done->kind) << " after " << done->turns_used << " turn(s)\n";
      return result;
    }
    const Participant actor = v.system.actor_to_move;
    const DialogState& view = v.of(actor);
    const LegalMoves moves = legal_moves(view);
    DialogAct act;
    if (actor == opts.human) {
      show_state(view, out);
      const std::vector<DialogAct> all = moves.all();
      for (std::size_t i = 0; i < all.size(); ++i) out << "  " << i + 1 << ". " << to_string(all[i]) << "\n";
      auto k = read_choice(all.size(), in, out);
      if (!k) {
        out << "\ninput ended; session stopped\n";
        return result;
      }
      act = all[*k];
    } else {
      act = machine.choose(view, moves, rng);
    }
    Event e = apply_act(v, act, actor);
    out << to_string(actor) << ": " << to_string(e.act) << "\n";
    if (e.act.is_open()) out << "agenda pushed: " << to_string(v.system.top()->atoms) << "\n";
    result.transcript.push_back(std::move(e));
  }
}

std::string format_transcript(const std::vector<Event>& events) {
  std::string out;
  for (const auto& e : events) out += format_event(e) + "\n";
  return out;
}

}  // namespace ids
