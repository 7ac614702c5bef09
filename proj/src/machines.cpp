#include "tailopt/machines.hpp"

#include <algorithm>
#include <sstream>

#include "tailopt/error.hpp"

namespace tailopt {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw InvalidArgument("alphabet must not be empty");
    for (Symbol i = 0; i < symbols_.size(); ++i) {
        if (symbols_[i].empty()) throw InvalidArgument("empty symbol name");
        if (!index_.emplace(symbols_[i], i).second)
            throw InvalidArgument("duplicate symbol '" + symbols_[i] + "'");
    }
}

std::optional<Symbol> Alphabet::find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Symbol Alphabet::at(std::string_view name) const {
    if (auto s = find(name)) return *s;
    throw UnknownSymbol("unknown symbol '" + std::string(name) + "'");
}

std::vector<std::string> indexed_names(std::size_t count, std::string_view prefix) {
    std::vector<std::string> names;
    names.reserve(count);
    for (std::size_t i = 0; i < count; ++i) names.push_back(std::string(prefix) + std::to_string(i));
    return names;
}

std::string format_word(const Alphabet& alphabet, std::span<const Symbol> word) {
    std::string text;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (i) text += ' ';
        text += alphabet.name(word[i]);
    }
    return text;
}

Word parse_word(const Alphabet& alphabet, std::string_view text) {
    Word word;
    std::istringstream in{std::string(text)};
    std::string token;
    while (in >> token) word.push_back(alphabet.at(token));
    return word;
}

namespace {

void check_states(const std::vector<std::string>& states, StateId initial) {
    if (states.empty()) throw InvalidArgument("machine has no states");
    if (initial >= states.size()) throw InvalidArgument("initial state out of range");
    std::vector<std::string> sorted = states;
    std::sort(sorted.begin(), sorted.end());
    if (auto dup = std::adjacent_find(sorted.begin(), sorted.end()); dup != sorted.end())
        throw InvalidArgument("duplicate state '" + *dup + "'");
}

void normalise_targets(std::vector<std::vector<StateId>>& delta, std::size_t state_count) {
    for (auto& targets : delta) {
        std::sort(targets.begin(), targets.end());
        targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
        if (!targets.empty() && targets.back() >= state_count)
            throw InvalidArgument("transition target out of range");
    }
}

}  // namespace

MealyMachine::MealyMachine(Alphabet inputs, Alphabet outputs, std::vector<std::string> states, StateId initial,
                           std::vector<StateId> next, std::vector<Symbol> out)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), states_(std::move(states)),
      initial_(initial), next_(std::move(next)), out_(std::move(out)) {
    if (inputs_.empty() || outputs_.empty()) throw InvalidArgument("mealy machine needs both alphabets");
    check_states(states_, initial_);
    const std::size_t cells = states_.size() * inputs_.size();
    if (next_.size() != cells || out_.size() != cells)
        throw InvalidArgument("mealy machine tables must cover every (state, input) pair");
    for (std::size_t i = 0; i < cells; ++i) {
        if (next_[i] >= states_.size()) throw InvalidArgument("transition target out of range");
        if (out_[i] >= outputs_.size()) throw InvalidArgument("output symbol out of range");
    }
}

Nfa::Nfa(Alphabet alphabet, std::vector<std::string> states, StateId initial,
         std::vector<std::vector<StateId>> delta)
    : alphabet_(std::move(alphabet)), states_(std::move(states)), initial_(initial), delta_(std::move(delta)) {
    if (alphabet_.empty()) throw InvalidArgument("nfa needs an alphabet");
    check_states(states_, initial_);
    if (delta_.size() != states_.size() * alphabet_.size())
        throw InvalidArgument("nfa table must cover every (state, symbol) pair");
    normalise_targets(delta_, states_.size());
}

bool Nfa::accepts(std::span<const Symbol> word) const {
    std::vector<char> current(states_.size(), 0), next(states_.size(), 0);
    current[initial_] = 1;
    for (Symbol a : word) {
        std::fill(next.begin(), next.end(), 0);
        bool any = false;
        for (StateId s = 0; s < states_.size(); ++s) {
            if (!current[s]) continue;
            for (StateId t : successors(s, a)) next[t] = 1, any = true;
        }
        if (!any) return false;
        current.swap(next);
    }
    return true;
}

ObservationMachine::ObservationMachine(Alphabet inputs, Alphabet outputs, std::vector<std::string> states,
                                       StateId initial, std::vector<std::vector<StateId>> delta,
                                       std::vector<Symbol> out)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), states_(std::move(states)),
      initial_(initial), delta_(std::move(delta)), out_(std::move(out)) {
    if (inputs_.empty() || outputs_.empty()) throw InvalidArgument("observation machine needs both alphabets");
    check_states(states_, initial_);
    const std::size_t cells = states_.size() * inputs_.size();
    if (delta_.size() != cells || out_.size() != cells)
        throw InvalidArgument("observation machine tables must cover every (state, input) pair");
    normalise_targets(delta_, states_.size());
    for (std::size_t i = 0; i < cells; ++i) {
        if (delta_[i].empty()) {
            out_[i] = 0;
        } else if (out_[i] >= outputs_.size()) {
            throw InvalidArgument("output symbol out of range");
        }
    }
}

ObservationMachine ObservationMachine::from_mealy(const MealyMachine& m) {
    std::vector<std::vector<StateId>> delta;
    delta.reserve(m.next_table().size());
    for (StateId t : m.next_table()) delta.push_back({t});
    return ObservationMachine(m.inputs(), m.outputs(), m.state_names(), m.initial(), std::move(delta),
                              m.output_table());
}

std::size_t ObservationMachine::degree() const {
    std::size_t d = 0;
    for (const auto& targets : delta_) d = std::max(d, targets.size());
    return d;
}

std::size_t ObservationMachine::size() const {
    std::size_t total = states_.size();
    for (const auto& targets : delta_) total += targets.size();
    return total;
}

std::size_t ObservationMachine::domain_size() const {
    return static_cast<std::size_t>(
        std::count_if(delta_.begin(), delta_.end(), [](const auto& t) { return !t.empty(); }));
}

}  // namespace tailopt
