#pragma once

#include <random>
#include <string>

#include "tailopt/generators.hpp"
#include "tailopt/machine_io.hpp"
#include "tailopt/machines.hpp"

namespace support {

inline tailopt::Word random_word(std::mt19937_64& rng, std::size_t alpha, std::size_t len) {
    tailopt::Word w(len);
    for (auto& s : w) s = static_cast<tailopt::Symbol>(rng() % alpha);
    return w;
}

inline tailopt::Alphabet letters(std::size_t k, const char* prefix) {
    return tailopt::Alphabet(tailopt::indexed_names(k, prefix));
}

/// Random cascade with independently chosen sizes in [1, max_states] and
/// alphabet sizes in [min_alpha, max_alpha].
inline tailopt::Cascade random_small_cascade(std::mt19937_64& rng, std::size_t max_states, std::size_t min_alpha,
                                             std::size_t max_alpha) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return lo + rng() % (hi - lo + 1); };
    auto x = letters(pick(min_alpha, max_alpha), "x");
    auto y = letters(pick(min_alpha, max_alpha), "y");
    auto z = letters(pick(min_alpha, max_alpha), "z");
    auto h = tailopt::random_mealy(pick(1, max_states), x, y, rng());
    auto t = tailopt::random_mealy(pick(1, max_states), y, z, rng());
    return {h, t};
}

}  // namespace support
