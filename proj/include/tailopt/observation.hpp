#pragma once

#include <optional>
#include <span>

#include "tailopt/machines.hpp"

namespace tailopt {

struct Consistency {
    bool consistent = true;
    /// Shortest defined word on which two runs produce different outputs.
    std::optional<Word> witness;
};

/// Breadth-first search over pairs of states reachable by a common word.
Consistency is_consistent(const ObservationMachine& m);
/// Throws InconsistentMachine (with the witness in the message) unless consistent.
void require_consistent(const ObservationMachine& m, const char* context);

struct Implementation {
    bool implements = true;
    /// Shortest word defined in the specification on which outputs differ.
    std::optional<Word> witness;
};

/// Does `n` agree with `m` on every word defined in `m`? O(|n||m|).
/// Throws AlphabetMismatch, InconsistentMachine.
Implementation implements(const MealyMachine& n, const ObservationMachine& m);

/// Set of states reached by all runs on `word` from the initial state; empty
/// iff the word is not defined.
std::vector<StateId> reach(const ObservationMachine& m, std::span<const Symbol> word);

/// Output of a consistent machine on a defined word; nullopt when undefined.
std::optional<Word> om_output(const ObservationMachine& m, std::span<const Symbol> word);

/// Erases input labels: accepts exactly the output words of `h`.
Nfa image_automaton(const MealyMachine& h);

/// `t` restricted to the language of `a`: defined exactly on L(a), agreeing
/// with `t` there. Reachable part of the product only.
ObservationMachine restriction(const MealyMachine& t, const Nfa& a);

/// Drops states unreachable from the initial state; states keep their
/// relative order.
ObservationMachine trim_unreachable(const ObservationMachine& m);

/// Subset construction over a consistent machine. Pairs undefined for every
/// state of a subset become self-loops emitting the first output symbol.
/// The result implements `m`. Throws TooLarge past `state_cap` subsets.
MealyMachine determinize(const ObservationMachine& m, std::size_t state_cap = std::size_t{1} << 20);

}  // namespace tailopt
