#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "tailopt/deadline.hpp"
#include "tailopt/sat.hpp"

namespace tailopt::detail {

/// Conflict-driven clause-learning solver: two watched literals, first-UIP
/// learning with recursive minimisation, VSIDS, phase saving, Luby restarts
/// and activity-based learnt-clause deletion.
class CdclSolver {
public:
    explicit CdclSolver(const Cnf& f);
    SatStatus solve(const Deadline& deadline);
    /// Valid after solve() returned sat; indexed by external variable.
    std::vector<bool> model() const;

    std::uint64_t conflicts() const noexcept { return conflicts_; }

private:
    using Lit = std::uint32_t;  // 2 * var + sign
    using CRef = std::uint32_t;
    static constexpr CRef no_reason = UINT32_MAX;
    static constexpr std::uint8_t l_true = 0, l_false = 1, l_undef = 2;

    struct Watcher {
        CRef cref;
        Lit blocker;
    };

    static Lit make_lit(int dimacs) {
        int v = dimacs > 0 ? dimacs - 1 : -dimacs - 1;
        return static_cast<Lit>(2 * v + (dimacs < 0 ? 1 : 0));
    }
    static std::uint32_t var(Lit l) { return l >> 1; }
    static Lit neg(Lit l) { return l ^ 1u; }

    std::uint8_t value(Lit l) const {
        std::uint8_t a = assigns_[var(l)];
        return a == l_undef ? l_undef : static_cast<std::uint8_t>(a ^ (l & 1u));
    }

    // Clause arena layout: [size, flags (bit0 learnt) | lbd << 1, activity bits, lits...]
    std::uint32_t clause_size(CRef c) const { return arena_[c]; }
    Lit* clause_lits(CRef c) { return &arena_[c + 3]; }
    const Lit* clause_lits(CRef c) const { return &arena_[c + 3]; }
    bool is_learnt(CRef c) const { return arena_[c + 1] & 1u; }
    std::uint32_t lbd(CRef c) const { return arena_[c + 1] >> 1; }
    float activity(CRef c) const { return std::bit_cast<float>(arena_[c + 2]); }
    void set_activity(CRef c, float a) { arena_[c + 2] = std::bit_cast<std::uint32_t>(a); }

    CRef alloc_clause(const std::vector<Lit>& lits, bool learnt, std::uint32_t lbd);
    void attach(CRef c);
    bool add_input_clause(std::vector<Lit> lits);

    void enqueue(Lit l, CRef reason);
    CRef propagate();
    void analyze(CRef conflict, std::vector<Lit>& learnt, std::uint32_t& backtrack_level);
    bool redundant(Lit p, std::uint32_t abstract_levels);
    void cancel_until(std::uint32_t level);
    std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }
    Lit pick_branch();

    void bump_var(std::uint32_t v);
    void bump_clause(CRef c);
    void reduce_db();

    // Binary max-heap on variable activity.
    void heap_insert(std::uint32_t v);
    void heap_up(std::size_t i);
    void heap_down(std::size_t i);
    std::uint32_t heap_pop();

    enum class Step { sat, unsat, restart, out_of_time };
    Step search(std::int64_t conflict_budget, const Deadline& deadline);

    std::uint32_t n_vars_ = 0;
    int external_vars_ = 0;
    bool trivially_unsat_ = false;

    std::vector<std::uint32_t> arena_;
    std::vector<CRef> learnts_;
    std::size_t original_clause_count_ = 0;
    std::vector<std::vector<Watcher>> watches_;

    std::vector<std::uint8_t> assigns_;
    std::vector<std::uint8_t> saved_phase_;
    std::vector<std::uint32_t> level_;
    std::vector<CRef> reason_;
    std::vector<Lit> trail_;
    std::vector<std::uint32_t> trail_lim_;
    std::size_t qhead_ = 0;

    std::vector<double> var_activity_;
    double var_inc_ = 1.0;
    double clause_inc_ = 1.0;
    std::vector<std::uint32_t> heap_;
    std::vector<std::int32_t> heap_index_;

    std::vector<std::uint8_t> seen_;
    std::vector<Lit> analyze_stack_;
    std::vector<Lit> analyze_clear_;

    double max_learnts_ = 0;
    std::uint64_t conflicts_ = 0;
};

}  // namespace tailopt::detail
