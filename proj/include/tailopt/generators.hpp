#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "tailopt/machines.hpp"

namespace tailopt {

using Seed = std::uint64_t;

/// Uniform integer in [0, bound) by rejection sampling, so results do not
/// depend on the standard library's distribution implementation.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);

/// Complete machine with uniformly random successors and outputs. Every
/// state is kept, reachable or not.
MealyMachine random_mealy(std::size_t states, const Alphabet& inputs, const Alphabet& outputs, Seed seed);
/// Inputs are named x0, x1, ... and outputs y0, y1, ...
MealyMachine random_mealy(std::size_t states, std::size_t in_size, std::size_t out_size, Seed seed);

struct Cascade {
    MealyMachine head;
    MealyMachine tail;
};

/// Head over x* -> y*, tail over y* -> z*, all alphabets of size `alpha`,
/// both drawn from one seeded stream.
Cascade random_cascade(std::size_t head_states, std::size_t tail_states, std::size_t alpha, Seed seed);

/// Random observation machine (not necessarily consistent): each pair is
/// defined with probability `defined_percent`/100 and gets 1..max_degree
/// distinct successors.
ObservationMachine random_om(std::size_t states, std::size_t in_size, std::size_t out_size, std::size_t max_degree,
                             unsigned defined_percent, Seed seed);

/// `base`, or `base` with primes appended until it is not in `taken`.
std::string fresh_symbol(std::string base, const std::vector<std::string>& taken);

/// Head and tail such that the tail is k-replaceable iff `n` has a k-state
/// implementation. `n` must be consistent with degree at most 1.
Cascade np_reduction(const ObservationMachine& n);

struct SplitInstance {
    MealyMachine head;
    MealyMachine model;
};

/// Head and model over inputs Y x [d] whose tail solutions all agree with
/// `n` on its defined words. `n` must be consistent.
SplitInstance split_om(const ObservationMachine& n);

/// Degree-2 machine over {a, b} with (n+1)^2 states whose implementations
/// all have at least 2^n states.
ObservationMachine exp_family(std::size_t n);

}  // namespace tailopt
