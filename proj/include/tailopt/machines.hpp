#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace tailopt {

using StateId = std::uint32_t;
using Symbol = std::uint32_t;
using Word = std::vector<Symbol>;

/// Ordered set of named symbols. A symbol's index is its declaration position.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(std::vector<std::string> symbols);

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    const std::string& name(Symbol s) const { return symbols_.at(s); }
    const std::vector<std::string>& names() const noexcept { return symbols_; }

    std::optional<Symbol> find(std::string_view name) const;
    /// Like find(), but throws UnknownSymbol.
    Symbol at(std::string_view name) const;

    bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

private:
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, Symbol> index_;
};

/// Names "s0", "s1", ... used for generated machines.
std::vector<std::string> indexed_names(std::size_t count, std::string_view prefix = "s");

/// Word of symbol indices rendered with the alphabet's names, space-separated.
std::string format_word(const Alphabet& alphabet, std::span<const Symbol> word);
/// Inverse of format_word; throws UnknownSymbol.
Word parse_word(const Alphabet& alphabet, std::string_view text);

/// Completely specified deterministic Mealy machine. Transition tables are
/// row-major: entry `state * inputs().size() + symbol`.
class MealyMachine {
public:
    MealyMachine(Alphabet inputs, Alphabet outputs, std::vector<std::string> states, StateId initial,
                 std::vector<StateId> next, std::vector<Symbol> out);

    const Alphabet& inputs() const noexcept { return inputs_; }
    const Alphabet& outputs() const noexcept { return outputs_; }
    std::size_t state_count() const noexcept { return states_.size(); }
    const std::vector<std::string>& state_names() const noexcept { return states_; }
    StateId initial() const noexcept { return initial_; }

    StateId next(StateId s, Symbol x) const { return next_[s * inputs_.size() + x]; }
    Symbol output(StateId s, Symbol x) const { return out_[s * inputs_.size() + x]; }

    const std::vector<StateId>& next_table() const noexcept { return next_; }
    const std::vector<Symbol>& output_table() const noexcept { return out_; }

    bool operator==(const MealyMachine&) const = default;

private:
    Alphabet inputs_;
    Alphabet outputs_;
    std::vector<std::string> states_;
    StateId initial_;
    std::vector<StateId> next_;
    std::vector<Symbol> out_;
};

/// Nondeterministic automaton with every state accepting, so its language is
/// prefix-closed.
class Nfa {
public:
    /// `delta` is row-major over (state, symbol); each entry is sorted and
    /// deduplicated on construction.
    Nfa(Alphabet alphabet, std::vector<std::string> states, StateId initial,
        std::vector<std::vector<StateId>> delta);

    const Alphabet& alphabet() const noexcept { return alphabet_; }
    std::size_t state_count() const noexcept { return states_.size(); }
    const std::vector<std::string>& state_names() const noexcept { return states_; }
    StateId initial() const noexcept { return initial_; }

    const std::vector<StateId>& successors(StateId s, Symbol a) const {
        return delta_[s * alphabet_.size() + a];
    }

    /// True iff some run reads the whole word.
    bool accepts(std::span<const Symbol> word) const;

    bool operator==(const Nfa&) const = default;

private:
    Alphabet alphabet_;
    std::vector<std::string> states_;
    StateId initial_;
    std::vector<std::vector<StateId>> delta_;
};

/// Partially specified transducer whose next-state function is set-valued
/// (universal branching). A pair (s, y) is in the domain iff its successor
/// set is nonempty.
class ObservationMachine {
public:
    /// `delta` and `out` are row-major over (state, input). Entries of `out`
    /// at undefined pairs are ignored and normalised to 0.
    ObservationMachine(Alphabet inputs, Alphabet outputs, std::vector<std::string> states, StateId initial,
                       std::vector<std::vector<StateId>> delta, std::vector<Symbol> out);

    /// The degree-1 view of a complete machine.
    static ObservationMachine from_mealy(const MealyMachine& m);

    const Alphabet& inputs() const noexcept { return inputs_; }
    const Alphabet& outputs() const noexcept { return outputs_; }
    std::size_t state_count() const noexcept { return states_.size(); }
    const std::vector<std::string>& state_names() const noexcept { return states_; }
    StateId initial() const noexcept { return initial_; }

    bool defined(StateId s, Symbol y) const { return !delta_[s * inputs_.size() + y].empty(); }
    const std::vector<StateId>& successors(StateId s, Symbol y) const { return delta_[s * inputs_.size() + y]; }
    /// Meaningful only when defined(s, y).
    Symbol output(StateId s, Symbol y) const { return out_[s * inputs_.size() + y]; }

    /// Maximum branching over the domain; 0 for an empty domain.
    std::size_t degree() const;
    /// |S| plus the total number of transition targets.
    std::size_t size() const;
    std::size_t domain_size() const;

    bool operator==(const ObservationMachine&) const = default;

private:
    Alphabet inputs_;
    Alphabet outputs_;
    std::vector<std::string> states_;
    StateId initial_;
    std::vector<std::vector<StateId>> delta_;
    std::vector<Symbol> out_;
};

using AnyMachine = std::variant<MealyMachine, Nfa, ObservationMachine>;

/// States visited, inputs read and outputs produced by a machine on a word.
struct Run {
    std::vector<StateId> states;
    Word inputs;
    Word outputs;
};

}  // namespace tailopt
