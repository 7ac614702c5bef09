#pragma once

#include <optional>
#include <span>

#include "tailopt/machines.hpp"

namespace tailopt {

/// Output word produced from the initial state. Throws UnknownSymbol for an
/// out-of-range input.
Word run_machine(const MealyMachine& m, std::span<const Symbol> word);
Run run_trace(const MealyMachine& m, std::span<const Symbol> word);

/// Product machine of a head feeding a tail, restricted to reachable pairs.
/// Throws AlphabetMismatch unless t.inputs() == h.outputs().
MealyMachine compose_cascade(const MealyMachine& h, const MealyMachine& t);

struct Equivalence {
    bool equivalent = true;
    /// Shortest input word on which the machines disagree.
    std::optional<Word> counterexample;
};

/// Language equivalence by breadth-first traversal of the product.
Equivalence equivalent(const MealyMachine& a, const MealyMachine& b);

/// Machine with only the states reachable from the initial one, renumbered in
/// breadth-first order.
MealyMachine trim_unreachable(const MealyMachine& m);

/// Minimal equivalent complete machine (partition refinement on the
/// reachable part).
MealyMachine minimize_complete(const MealyMachine& m);

/// One-state machine mapping each symbol to itself.
MealyMachine identity_machine(const Alphabet& alphabet);

}  // namespace tailopt
