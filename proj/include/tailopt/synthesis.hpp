#pragma once

#include <optional>
#include <utility>

#include "tailopt/machines.hpp"
#include "tailopt/minimization.hpp"

namespace tailopt {

struct FeasibilityVerdict {
    bool feasible = true;
    /// Two equally long input words on which the head agrees and the model
    /// does not. Shortest such pair.
    std::optional<std::pair<Word, Word>> witness;
};

/// Is there a tail `t` with compose_cascade(h, t) equivalent to `m`?
/// Breadth-first search over quadruples of states. Throws AlphabetMismatch.
FeasibilityVerdict feasible(const MealyMachine& h, const MealyMachine& m);

/// Observation machine whose implementations are exactly the solutions `t`.
/// States are the reachable pairs of h x m. Throws InvalidArgument when the
/// equation has no solution.
ObservationMachine solution_om(const MealyMachine& h, const MealyMachine& m);

/// A solution obtained by determinising the solution machine. Throws
/// TooLarge past `state_cap` states.
MealyMachine some_solution(const MealyMachine& h, const MealyMachine& m,
                           std::size_t state_cap = std::size_t{1} << 20);

/// A solution with the fewest states. The determinised solution bounds the
/// search and is only built if the search gets that far.
MinimizeResult minimal_solution(const MealyMachine& h, const MealyMachine& m, const MinimizeOptions& options = {},
                                std::size_t state_cap = std::size_t{1} << 20);

}  // namespace tailopt
