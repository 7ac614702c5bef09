#include "cdcl.hpp"

#include <algorithm>
#include <cmath>

namespace tailopt::detail {

namespace {

double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::pow(y, seq);
}

}  // namespace

CdclSolver::CdclSolver(const Cnf& f) {
    external_vars_ = f.var_count();
    n_vars_ = static_cast<std::uint32_t>(f.var_count());
    watches_.resize(2 * static_cast<std::size_t>(n_vars_));
    assigns_.assign(n_vars_, l_undef);
    saved_phase_.assign(n_vars_, 1);  // prefer false
    level_.assign(n_vars_, 0);
    reason_.assign(n_vars_, no_reason);
    var_activity_.assign(n_vars_, 0.0);
    heap_index_.assign(n_vars_, -1);
    seen_.assign(n_vars_, 0);
    for (std::uint32_t v = 0; v < n_vars_; ++v) heap_insert(v);

    if (f.marked_unsat()) {
        trivially_unsat_ = true;
        return;
    }
    arena_.reserve(f.literal_count() + 3 * f.clause_count());
    std::vector<Lit> lits;
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        lits.clear();
        for (int l : f.clause(i)) lits.push_back(make_lit(l));
        if (!add_input_clause(lits)) {
            trivially_unsat_ = true;
            return;
        }
    }
    original_clause_count_ = f.clause_count();
    max_learnts_ = std::max(static_cast<double>(original_clause_count_) / 3.0, 5000.0);
}

bool CdclSolver::add_input_clause(std::vector<Lit> lits) {
    std::sort(lits.begin(), lits.end());
    std::size_t j = 0;
    Lit prev = UINT32_MAX;
    for (Lit l : lits) {
        if (prev != UINT32_MAX && l == neg(prev)) return true;  // tautology
        std::uint8_t v = value(l);
        if (v == l_true) return true;
        if (v == l_false || l == prev) continue;
        lits[j++] = prev = l;
    }
    lits.resize(j);
    if (lits.empty()) return false;
    if (lits.size() == 1) {
        enqueue(lits[0], no_reason);
        return propagate() == no_reason;
    }
    attach(alloc_clause(lits, false, 0));
    return true;
}

CdclSolver::CRef CdclSolver::alloc_clause(const std::vector<Lit>& lits, bool learnt, std::uint32_t lbd) {
    auto c = static_cast<CRef>(arena_.size());
    arena_.push_back(static_cast<std::uint32_t>(lits.size()));
    arena_.push_back((learnt ? 1u : 0u) | (lbd << 1));
    arena_.push_back(std::bit_cast<std::uint32_t>(0.0f));
    arena_.insert(arena_.end(), lits.begin(), lits.end());
    return c;
}

void CdclSolver::attach(CRef c) {
    const Lit* lits = clause_lits(c);
    watches_[lits[0]].push_back({c, lits[1]});
    watches_[lits[1]].push_back({c, lits[0]});
}

void CdclSolver::enqueue(Lit l, CRef reason) {
    std::uint32_t v = var(l);
    assigns_[v] = static_cast<std::uint8_t>(l & 1u);
    level_[v] = decision_level();
    reason_[v] = reason;
    trail_.push_back(l);
}

CdclSolver::CRef CdclSolver::propagate() {
    CRef conflict = no_reason;
    while (qhead_ < trail_.size()) {
        Lit p = trail_[qhead_++];
        Lit false_lit = neg(p);
        auto& ws = watches_[false_lit];
        std::size_t i = 0, j = 0;
        const std::size_t end = ws.size();
        while (i < end) {
            Watcher w = ws[i++];
            if (value(w.blocker) == l_true) {
                ws[j++] = w;
                continue;
            }
            Lit* lits = clause_lits(w.cref);
            if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
            Lit first = lits[0];
            Watcher kept{w.cref, first};
            if (first != w.blocker && value(first) == l_true) {
                ws[j++] = kept;
                continue;
            }
            const std::uint32_t size = clause_size(w.cref);
            bool moved = false;
            for (std::uint32_t k = 2; k < size; ++k) {
                if (value(lits[k]) != l_false) {
                    std::swap(lits[1], lits[k]);
                    watches_[lits[1]].push_back(kept);
                    moved = true;
                    break;
                }
            }
            if (moved) continue;
            ws[j++] = kept;
            if (value(first) == l_false) {
                conflict = w.cref;
                qhead_ = trail_.size();
                while (i < end) ws[j++] = ws[i++];
            } else {
                enqueue(first, w.cref);
            }
        }
        ws.resize(j);
        if (conflict != no_reason) break;
    }
    return conflict;
}

void CdclSolver::bump_var(std::uint32_t v) {
    if ((var_activity_[v] += var_inc_) > 1e100) {
        for (auto& a : var_activity_) a *= 1e-100;
        var_inc_ *= 1e-100;
    }
    if (heap_index_[v] >= 0) heap_up(static_cast<std::size_t>(heap_index_[v]));
}

void CdclSolver::bump_clause(CRef c) {
    set_activity(c, activity(c) + static_cast<float>(clause_inc_));
    if (activity(c) > 1e20f) {
        for (CRef l : learnts_) set_activity(l, activity(l) * 1e-20f);
        clause_inc_ *= 1e-20;
    }
}

void CdclSolver::analyze(CRef conflict, std::vector<Lit>& learnt, std::uint32_t& backtrack_level) {
    learnt.clear();
    learnt.push_back(0);
    int path = 0;
    Lit p = UINT32_MAX;
    std::size_t index = trail_.size();
    CRef c = conflict;
    do {
        if (is_learnt(c)) bump_clause(c);
        const Lit* lits = clause_lits(c);
        const std::uint32_t size = clause_size(c);
        for (std::uint32_t k = (p == UINT32_MAX ? 0 : 1); k < size; ++k) {
            Lit q = lits[k];
            std::uint32_t v = var(q);
            if (seen_[v] || level_[v] == 0) continue;
            bump_var(v);
            seen_[v] = 1;
            if (level_[v] >= decision_level()) ++path;
            else learnt.push_back(q);
        }
        while (!seen_[var(trail_[--index])]) {
        }
        p = trail_[index];
        c = reason_[var(p)];
        seen_[var(p)] = 0;
        --path;
    } while (path > 0);
    learnt[0] = neg(p);

    // Recursive minimisation: drop literals implied by the rest of the clause.
    analyze_clear_.assign(learnt.begin(), learnt.end());
    std::uint32_t abstract_levels = 0;
    for (std::size_t k = 1; k < learnt.size(); ++k) abstract_levels |= 1u << (level_[var(learnt[k])] & 31u);
    std::size_t j = 1;
    for (std::size_t k = 1; k < learnt.size(); ++k) {
        if (reason_[var(learnt[k])] == no_reason || !redundant(learnt[k], abstract_levels)) learnt[j++] = learnt[k];
    }
    learnt.resize(j);

    backtrack_level = 0;
    if (learnt.size() > 1) {
        std::size_t max_i = 1;
        for (std::size_t k = 2; k < learnt.size(); ++k)
            if (level_[var(learnt[k])] > level_[var(learnt[max_i])]) max_i = k;
        std::swap(learnt[1], learnt[max_i]);
        backtrack_level = level_[var(learnt[1])];
    }
    for (Lit l : analyze_clear_) seen_[var(l)] = 0;
}

bool CdclSolver::redundant(Lit p, std::uint32_t abstract_levels) {
    analyze_stack_.clear();
    analyze_stack_.push_back(p);
    const std::size_t top = analyze_clear_.size();
    while (!analyze_stack_.empty()) {
        CRef c = reason_[var(analyze_stack_.back())];
        analyze_stack_.pop_back();
        const Lit* lits = clause_lits(c);
        const std::uint32_t size = clause_size(c);
        for (std::uint32_t k = 1; k < size; ++k) {
            Lit q = lits[k];
            std::uint32_t v = var(q);
            if (seen_[v] || level_[v] == 0) continue;
            if (reason_[v] != no_reason && (abstract_levels & (1u << (level_[v] & 31u)))) {
                seen_[v] = 1;
                analyze_stack_.push_back(q);
                analyze_clear_.push_back(q);
            } else {
                for (std::size_t i = top; i < analyze_clear_.size(); ++i) seen_[var(analyze_clear_[i])] = 0;
                analyze_clear_.resize(top);
                return false;
            }
        }
    }
    return true;
}

void CdclSolver::cancel_until(std::uint32_t level) {
    if (decision_level() <= level) return;
    for (std::size_t i = trail_.size(); i-- > trail_lim_[level];) {
        std::uint32_t v = var(trail_[i]);
        saved_phase_[v] = static_cast<std::uint8_t>(trail_[i] & 1u);
        assigns_[v] = l_undef;
        reason_[v] = no_reason;
        if (heap_index_[v] < 0) heap_insert(v);
    }
    trail_.resize(trail_lim_[level]);
    trail_lim_.resize(level);
    qhead_ = trail_.size();
}

CdclSolver::Lit CdclSolver::pick_branch() {
    while (!heap_.empty()) {
        std::uint32_t v = heap_pop();
        if (assigns_[v] == l_undef) return static_cast<Lit>(2 * v + saved_phase_[v]);
    }
    return UINT32_MAX;
}

void CdclSolver::reduce_db() {
    // Called at decision level 0 only, so no learnt clause is a live reason.
    std::sort(learnts_.begin(), learnts_.end(), [this](CRef a, CRef b) {
        if ((lbd(a) <= 2) != (lbd(b) <= 2)) return lbd(a) > 2;
        return activity(a) < activity(b);
    });
    const std::size_t drop = learnts_.size() / 2;
    std::vector<CRef> doomed;
    for (std::size_t i = 0; i < drop; ++i)
        if (lbd(learnts_[i]) > 2 && clause_size(learnts_[i]) > 2) doomed.push_back(learnts_[i]);
    std::sort(doomed.begin(), doomed.end());

    // Compact the arena and rebuild every watch list.
    std::vector<std::uint32_t> compact;
    compact.reserve(arena_.size());
    std::vector<CRef> new_learnts;
    CRef c = 0;
    std::size_t d = 0;
    while (c < arena_.size()) {
        const std::uint32_t words = 3 + clause_size(c);
        if (d < doomed.size() && doomed[d] == c) {
            ++d;
        } else {
            auto nc = static_cast<CRef>(compact.size());
            compact.insert(compact.end(), arena_.begin() + c, arena_.begin() + c + words);
            if (arena_[c + 1] & 1u) new_learnts.push_back(nc);
        }
        c += words;
    }
    arena_.swap(compact);
    learnts_.swap(new_learnts);
    for (auto& ws : watches_) ws.clear();
    for (CRef r = 0; r < arena_.size(); r += 3 + clause_size(r)) attach(r);
    for (Lit l : trail_) reason_[var(l)] = no_reason;
}

void CdclSolver::heap_insert(std::uint32_t v) {
    heap_index_[v] = static_cast<std::int32_t>(heap_.size());
    heap_.push_back(v);
    heap_up(heap_.size() - 1);
}

void CdclSolver::heap_up(std::size_t i) {
    std::uint32_t v = heap_[i];
    while (i > 0) {
        std::size_t parent = (i - 1) / 2;
        if (var_activity_[heap_[parent]] >= var_activity_[v]) break;
        heap_[i] = heap_[parent];
        heap_index_[heap_[i]] = static_cast<std::int32_t>(i);
        i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<std::int32_t>(i);
}

void CdclSolver::heap_down(std::size_t i) {
    std::uint32_t v = heap_[i];
    const std::size_t n = heap_.size();
    while (true) {
        std::size_t child = 2 * i + 1;
        if (child >= n) break;
        if (child + 1 < n && var_activity_[heap_[child + 1]] > var_activity_[heap_[child]]) ++child;
        if (var_activity_[heap_[child]] <= var_activity_[v]) break;
        heap_[i] = heap_[child];
        heap_index_[heap_[i]] = static_cast<std::int32_t>(i);
        i = child;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<std::int32_t>(i);
}

std::uint32_t CdclSolver::heap_pop() {
    std::uint32_t top = heap_[0];
    heap_index_[top] = -1;
    std::uint32_t last = heap_.back();
    heap_.pop_back();
    if (!heap_.empty()) {
        heap_[0] = last;
        heap_index_[last] = 0;
        heap_down(0);
    }
    return top;
}

CdclSolver::Step CdclSolver::search(std::int64_t conflict_budget, const Deadline& deadline) {
    std::int64_t local_conflicts = 0;
    std::vector<Lit> learnt;
    std::uint64_t steps = 0;
    while (true) {
        CRef conflict = propagate();
        if (conflict != no_reason) {
            ++conflicts_;
            ++local_conflicts;
            if (decision_level() == 0) return Step::unsat;
            std::uint32_t backtrack = 0;
            analyze(conflict, learnt, backtrack);
            cancel_until(backtrack);
            if (learnt.size() == 1) {
                enqueue(learnt[0], no_reason);
            } else {
                std::vector<std::uint32_t> levels;
                for (Lit l : learnt) levels.push_back(level_[var(l)]);
                std::sort(levels.begin(), levels.end());
                auto distinct = static_cast<std::uint32_t>(std::unique(levels.begin(), levels.end()) - levels.begin());
                CRef c = alloc_clause(learnt, true, std::min<std::uint32_t>(distinct, 0x7fffffff));
                attach(c);
                learnts_.push_back(c);
                bump_clause(c);
                enqueue(learnt[0], c);
            }
            var_inc_ /= 0.95;
            clause_inc_ /= 0.999;
        } else {
            if (local_conflicts >= conflict_budget) {
                cancel_until(0);
                return Step::restart;
            }
            Lit next = pick_branch();
            if (next == UINT32_MAX) return Step::sat;
            trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
            enqueue(next, no_reason);
        }
        if ((++steps & 1023u) == 0 && deadline.expired()) {
            cancel_until(0);
            return Step::out_of_time;
        }
    }
}

SatStatus CdclSolver::solve(const Deadline& deadline) {
    if (trivially_unsat_) return SatStatus::unsat;
    if (propagate() != no_reason) return SatStatus::unsat;
    for (int restart = 0;; ++restart) {
        const auto budget = static_cast<std::int64_t>(luby(2.0, restart) * 100);
        switch (search(budget, deadline)) {
            case Step::sat: return SatStatus::sat;
            case Step::unsat: return SatStatus::unsat;
            case Step::out_of_time: return SatStatus::timeout;
            case Step::restart: break;
        }
        if (deadline.expired()) return SatStatus::timeout;
        if (static_cast<double>(learnts_.size()) >= max_learnts_) {
            reduce_db();
            max_learnts_ *= 1.1;
        }
    }
}

std::vector<bool> CdclSolver::model() const {
    std::vector<bool> m(static_cast<std::size_t>(external_vars_) + 1, false);
    for (std::uint32_t v = 0; v < n_vars_; ++v) m[v + 1] = assigns_[v] == l_true;
    return m;
}

}  // namespace tailopt::detail
