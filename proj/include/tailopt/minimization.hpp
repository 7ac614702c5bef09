#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "tailopt/deadline.hpp"
#include "tailopt/machines.hpp"
#include "tailopt/sat.hpp"

namespace tailopt {

/// Symmetric incompatibility relation over the states of an observation
/// machine, stored as a bit matrix.
class CompatibilityRelation {
public:
    explicit CompatibilityRelation(std::size_t state_count);

    std::size_t state_count() const noexcept { return n_; }
    bool incompatible(StateId a, StateId b) const {
        std::size_t i = std::size_t{a} * n_ + b;
        return (bits_[i >> 6] >> (i & 63)) & 1u;
    }
    bool compatible(StateId a, StateId b) const { return !incompatible(a, b); }
    /// Returns false if the pair was already marked.
    bool mark(StateId a, StateId b);

    /// Number of states incompatible with `s`.
    std::size_t degree(StateId s) const { return degree_[s]; }
    /// Pairs {i, j} with i <= j, in lexicographic order.
    std::vector<std::pair<StateId, StateId>> incompatible_pairs() const;
    std::size_t pair_count() const noexcept { return pairs_; }

private:
    std::size_t n_;
    std::vector<std::uint64_t> bits_;
    std::vector<std::size_t> degree_;
    std::size_t pairs_ = 0;
};

/// Pairwise incompatible states; each needs its own class in any cover.
struct PartialSolution {
    std::vector<StateId> clique;
};

/// Classes of pairwise compatible states plus a successor class per
/// (class, input). Successor table is row-major: `class * inputs + symbol`.
struct CompatibleCover {
    std::vector<std::vector<StateId>> classes;
    std::vector<std::uint32_t> succ;

    std::size_t size() const noexcept { return classes.size(); }
    std::uint32_t successor(std::size_t cls, Symbol y, std::size_t inputs) const { return succ[cls * inputs + y]; }
};

/// Incompatible pairs as the least fixed point of: differing outputs on a
/// common defined input, or a common input leading to an incompatible pair
/// of successors. Throws InconsistentMachine.
CompatibilityRelation incompatibility(const ObservationMachine& m);

/// Degree-greedy maximal clique of the incompatibility graph: repeatedly
/// takes the highest-degree state compatible-free with the clique so far,
/// lowest index on ties.
PartialSolution greedy_clique(const CompatibilityRelation& rel);

/// Reasons a cover is not a closed cover of compatibles over `m`, empty when
/// it is one.
std::optional<std::string> cover_violation(const CompatibleCover& f, const ObservationMachine& m,
                                           const CompatibilityRelation& rel);

struct EncodeLimits {
    Deadline deadline = Deadline::never();
    /// Encodings beyond this many literals raise TooLarge.
    std::size_t max_literals = std::size_t{80} << 20;
};

/// Variable layout for the cover encoding: L(s, i) says state s belongs to
/// class i, N(i, j, y) says class j is a successor of class i under y.
struct CoverEncoding {
    Cnf cnf;
    std::size_t classes = 0;
    std::size_t states = 0;
    std::size_t inputs = 0;

    int membership(StateId s, std::size_t cls) const { return static_cast<int>(1 + s * classes + cls); }
    int successor(std::size_t from, std::size_t to, Symbol y) const {
        return static_cast<int>(1 + states * classes + (from * classes + to) * inputs + y);
    }
};

/// CNF satisfiable iff a closed cover of at most `classes` compatibles
/// exists. The clique states are pinned to classes 0..k-1. Throws
/// InvalidArgument when classes < clique size.
CoverEncoding encode_cover(const ObservationMachine& m, std::size_t classes, const CompatibilityRelation& rel,
                           const PartialSolution& partial, const EncodeLimits& limits = {});

/// Classes are read from L, successors pick the least true N; empty classes
/// are dropped.
CompatibleCover decode_cover(const std::vector<bool>& model, const CoverEncoding& encoding);

/// One state per class. Outputs come from any member defining the input,
/// otherwise the first output symbol. Throws InvalidArgument on a closure
/// violation.
MealyMachine cover_to_machine(const CompatibleCover& f, const ObservationMachine& m);

/// Classes are the specification states co-reachable with each state of `n`
/// (deduplicated). Throws InvalidArgument when `n` does not implement `m`.
CompatibleCover machine_to_cover(const MealyMachine& n, const ObservationMachine& m);

struct MinimizeOptions {
    /// A known implementation of the machine; its size bounds the search.
    std::optional<MealyMachine> witness;
    /// Computes a witness once the search passes the number of states. Defaults
    /// to determinisation.
    std::function<MealyMachine()> fallback_witness;
    Deadline deadline = Deadline::never();
    SolverOptions solver;
    EncodeLimits limits;
    /// Called with every encoding before it is solved.
    std::function<void(std::size_t classes, const Cnf&)> on_encoding;
};

struct MinimizeStats {
    std::size_t om_states = 0;
    std::size_t clique_size = 0;
    std::size_t sat_calls = 0;
    /// The clique matched the witness size, so no encoding was built.
    bool skipped_encoding = false;
    /// The witness was returned (skip path or search reached its size).
    bool returned_witness = false;
};

struct MinimizeResult {
    MealyMachine machine;
    MinimizeStats stats;
};

/// Minimal implementation by linear search on the number of classes, upward
/// from the clique size. Throws InconsistentMachine, Timeout (carrying the
/// bound being solved), TooLarge.
MinimizeResult minimize_om(const ObservationMachine& m, const MinimizeOptions& options = {});

struct TailResult {
    MealyMachine machine;
    MinimizeStats stats;
    /// True iff the clique equals |S_t|, in which case `t` is returned as is.
    bool skipped_encoding = false;
};

/// Minimal replacement of the tail in the cascade of `h` into `t`.
TailResult minimize_tail(const MealyMachine& h, const MealyMachine& t, const MinimizeOptions& options = {});

/// Bounded-synthesis baseline: guesses an n-state tail whose cascade with `h`
/// tracks every reachable product state of the original cascade.
struct NaiveEncoding {
    Cnf cnf;
    std::size_t states = 0;
    std::size_t inputs = 0;   // tail input alphabet size
    std::size_t outputs = 0;  // tail output alphabet size
    std::size_t product_states = 0;
    int d_base = 0, o_base = 0, r_base = 0;

    int transition(std::size_t q, Symbol y, std::size_t q2) const {
        return d_base + static_cast<int>((q * inputs + y) * states + q2);
    }
    int output(std::size_t q, Symbol y, Symbol z) const {
        return o_base + static_cast<int>((q * inputs + y) * outputs + z);
    }
    int pairing(std::size_t p, std::size_t q) const { return r_base + static_cast<int>(p * states + q); }
};

NaiveEncoding encode_replacement_naive(const MealyMachine& h, const MealyMachine& t, std::size_t states,
                                       const EncodeLimits& limits = {});
/// Candidate tail read off a model: least true successor, the true output.
MealyMachine decode_naive(const std::vector<bool>& model, const NaiveEncoding& encoding, const MealyMachine& t);

struct NaiveOptions {
    Deadline deadline = Deadline::never();
    SolverOptions solver;
    EncodeLimits limits;
    std::function<void(std::size_t states, const Cnf&)> on_encoding;
};

struct NaiveResult {
    MealyMachine machine;
    std::size_t sat_calls = 0;
};

/// Tries n = 1, 2, ..., |S_t|. Throws Timeout.
NaiveResult minimize_tail_naive(const MealyMachine& h, const MealyMachine& t, const NaiveOptions& options = {});

/// Does `candidate` behave like `t` behind `h`?
bool verify_replacement(const MealyMachine& h, const MealyMachine& t, const MealyMachine& candidate);

}  // namespace tailopt
