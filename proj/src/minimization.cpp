#include "tailopt/minimization.hpp"

#include <algorithm>
#include <limits>

#include "tailopt/error.hpp"
#include "tailopt/mealy_ops.hpp"
#include "tailopt/observation.hpp"

namespace tailopt {

CompatibilityRelation::CompatibilityRelation(std::size_t state_count)
    : n_(state_count), bits_((state_count * state_count + 63) / 64, 0), degree_(state_count, 0) {}

bool CompatibilityRelation::mark(StateId a, StateId b) {
    std::size_t i = std::size_t{a} * n_ + b;
    if ((bits_[i >> 6] >> (i & 63)) & 1u) return false;
    bits_[i >> 6] |= std::uint64_t{1} << (i & 63);
    std::size_t j = std::size_t{b} * n_ + a;
    bits_[j >> 6] |= std::uint64_t{1} << (j & 63);
    ++degree_[a];
    if (a != b) ++degree_[b];
    ++pairs_;
    return true;
}

std::vector<std::pair<StateId, StateId>> CompatibilityRelation::incompatible_pairs() const {
    std::vector<std::pair<StateId, StateId>> out;
    out.reserve(pairs_);
    for (StateId i = 0; i < n_; ++i) {
        if (degree_[i] == 0) continue;
        for (StateId j = i; j < n_; ++j)
            if (incompatible(i, j)) out.emplace_back(i, j);
    }
    return out;
}

namespace {

// Predecessor lists per (state, input) in compressed form.
struct Predecessors {
    std::vector<std::size_t> offset;
    std::vector<StateId> from;

    std::span<const StateId> of(StateId s, Symbol y, std::size_t inputs) const {
        std::size_t k = s * inputs + y;
        return {from.data() + offset[k], offset[k + 1] - offset[k]};
    }
};

Predecessors predecessors(const ObservationMachine& m) {
    const std::size_t ny = m.inputs().size();
    const std::size_t cells = m.state_count() * ny;
    Predecessors p;
    p.offset.assign(cells + 1, 0);
    for (StateId s = 0; s < m.state_count(); ++s)
        for (Symbol y = 0; y < ny; ++y)
            for (StateId t : m.successors(s, y)) ++p.offset[t * ny + y + 1];
    for (std::size_t k = 0; k < cells; ++k) p.offset[k + 1] += p.offset[k];
    p.from.resize(p.offset[cells]);
    std::vector<std::size_t> fill(p.offset.begin(), p.offset.end() - 1);
    for (StateId s = 0; s < m.state_count(); ++s)
        for (Symbol y = 0; y < ny; ++y)
            for (StateId t : m.successors(s, y)) p.from[fill[t * ny + y]++] = s;
    return p;
}

}  // namespace

CompatibilityRelation incompatibility(const ObservationMachine& m) {
    require_consistent(m, "incompatibility");
    const std::size_t n = m.state_count();
    const std::size_t ny = m.inputs().size();
    CompatibilityRelation rel(n);
    std::vector<std::pair<StateId, StateId>> work;

    for (StateId i = 0; i < n; ++i)
        for (StateId j = i + 1; j < n; ++j)
            for (Symbol y = 0; y < ny; ++y)
                if (m.defined(i, y) && m.defined(j, y) && m.output(i, y) != m.output(j, y)) {
                    rel.mark(i, j);
                    work.emplace_back(i, j);
                    break;
                }

    const Predecessors pred = predecessors(m);
    while (!work.empty()) {
        auto [p, q] = work.back();
        work.pop_back();
        for (Symbol y = 0; y < ny; ++y) {
            auto ps = pred.of(p, y, ny);
            if (ps.empty()) continue;
            auto qs = pred.of(q, y, ny);
            for (StateId a : ps)
                for (StateId b : qs)
                    if (rel.mark(a, b)) work.emplace_back(a, b);
        }
    }
    return rel;
}

PartialSolution greedy_clique(const CompatibilityRelation& rel) {
    PartialSolution result;
    const std::size_t n = rel.state_count();
    std::vector<StateId> candidates(n);
    for (StateId s = 0; s < n; ++s) candidates[s] = s;
    while (!candidates.empty()) {
        StateId best = candidates.front();
        for (StateId s : candidates)
            if (rel.degree(s) > rel.degree(best)) best = s;
        result.clique.push_back(best);
        std::erase_if(candidates, [&](StateId s) { return !rel.incompatible(s, best); });
    }
    return result;
}

std::optional<std::string> cover_violation(const CompatibleCover& f, const ObservationMachine& m,
                                           const CompatibilityRelation& rel) {
    const std::size_t ny = m.inputs().size();
    const std::size_t k = f.size();
    if (k == 0) return "cover has no classes";
    if (f.succ.size() != k * ny) return "successor table has the wrong size";
    std::vector<std::vector<char>> member(k, std::vector<char>(m.state_count(), 0));
    bool initial_covered = false;
    for (std::size_t i = 0; i < k; ++i) {
        for (StateId s : f.classes[i]) {
            if (s >= m.state_count()) return "class " + std::to_string(i) + " names an unknown state";
            member[i][s] = 1;
            if (s == m.initial()) initial_covered = true;
        }
        for (std::size_t a = 0; a < f.classes[i].size(); ++a)
            for (std::size_t b = a; b < f.classes[i].size(); ++b)
                if (rel.incompatible(f.classes[i][a], f.classes[i][b]))
                    return "class " + std::to_string(i) + " holds incompatible states " +
                           m.state_names()[f.classes[i][a]] + " and " + m.state_names()[f.classes[i][b]];
    }
    if (!initial_covered) return "no class contains the initial state";
    for (std::size_t i = 0; i < k; ++i)
        for (Symbol y = 0; y < ny; ++y) {
            std::uint32_t j = f.succ[i * ny + y];
            if (j >= k) return "successor index out of range";
            for (StateId s : f.classes[i])
                for (StateId t : m.successors(s, y))
                    if (!member[j][t])
                        return "class " + std::to_string(i) + " is not closed under " + m.inputs().name(y);
        }
    return std::nullopt;
}

namespace {

void check_limits(const EncodeLimits& limits, const Cnf& f, std::size_t bound) {
    if (f.literal_count() > limits.max_literals)
        throw TooLarge("encoding exceeds " + std::to_string(limits.max_literals) + " literals");
    if (limits.deadline.expired()) throw Timeout("deadline passed while encoding", bound);
}

int checked_var_count(std::size_t count) {
    if (count > static_cast<std::size_t>(std::numeric_limits<int>::max() / 2))
        throw TooLarge("encoding needs too many variables");
    return static_cast<int>(count);
}

}  // namespace

CoverEncoding encode_cover(const ObservationMachine& m, std::size_t classes, const CompatibilityRelation& rel,
                           const PartialSolution& partial, const EncodeLimits& limits) {
    if (classes == 0) throw InvalidArgument("cover size must be positive");
    if (classes < partial.clique.size())
        throw InvalidArgument("cover size " + std::to_string(classes) + " is below the clique size " +
                              std::to_string(partial.clique.size()));
    if (rel.state_count() != m.state_count()) throw InvalidArgument("relation does not match the machine");

    const std::size_t ns = m.state_count();
    const std::size_t ny = m.inputs().size();
    const std::size_t n = classes;

    std::size_t transitions = 0;
    for (StateId s = 0; s < ns; ++s)
        for (Symbol y = 0; y < ny; ++y) transitions += m.successors(s, y).size();
    const double estimate = 2.0 * rel.pair_count() * n + double(n) * ny * n + 3.0 * transitions * n * n;
    if (estimate > double(limits.max_literals))
        throw TooLarge("encoding for " + std::to_string(n) + " classes would need about " +
                       std::to_string(static_cast<long long>(estimate)) + " literals");

    CoverEncoding e;
    e.classes = n;
    e.states = ns;
    e.inputs = ny;
    e.cnf.new_vars(checked_var_count(ns * n + n * n * ny));
    if (e.cnf.var_count() <= (1 << 16)) {
        for (StateId s = 0; s < ns; ++s)
            for (std::size_t i = 0; i < n; ++i)
                e.cnf.annotate(e.membership(s, i), "L(" + m.state_names()[s] + "," + std::to_string(i) + ")");
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (Symbol y = 0; y < ny; ++y)
                    e.cnf.annotate(e.successor(i, j, y), "N(" + std::to_string(i) + "," + std::to_string(j) + "," +
                                                             m.inputs().name(y) + ")");
    }

    // (a) incompatible states never share a class
    for (auto [a, b] : rel.incompatible_pairs()) {
        for (std::size_t i = 0; i < n; ++i) {
            if (a == b) e.cnf.add_clause({-e.membership(a, i)});
            else e.cnf.add_clause({-e.membership(a, i), -e.membership(b, i)});
        }
    }
    check_limits(limits, e.cnf, n);

    // (b) the initial state is covered
    std::vector<int> clause;
    for (std::size_t i = 0; i < n; ++i) clause.push_back(e.membership(m.initial(), i));
    e.cnf.add_clause(clause);

    // (c) every class has a successor for every input
    for (std::size_t i = 0; i < n; ++i)
        for (Symbol y = 0; y < ny; ++y) {
            clause.clear();
            for (std::size_t j = 0; j < n; ++j) clause.push_back(e.successor(i, j, y));
            e.cnf.add_clause(clause);
        }

    // (d) closure
    for (StateId s = 0; s < ns; ++s) {
        for (Symbol y = 0; y < ny; ++y)
            for (StateId t : m.successors(s, y))
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        e.cnf.add_clause({-e.successor(i, j, y), -e.membership(s, i), e.membership(t, j)});
        if ((s & 63) == 63) check_limits(limits, e.cnf, n);
    }

    // (e) clique states pinned to distinct classes
    for (std::size_t k = 0; k < partial.clique.size(); ++k) e.cnf.add_clause({e.membership(partial.clique[k], k)});
    check_limits(limits, e.cnf, n);
    return e;
}

CompatibleCover decode_cover(const std::vector<bool>& model, const CoverEncoding& e) {
    auto truth = [&](int v) { return static_cast<std::size_t>(v) < model.size() && model[static_cast<std::size_t>(v)]; };
    std::vector<std::vector<StateId>> raw(e.classes);
    for (std::size_t i = 0; i < e.classes; ++i)
        for (StateId s = 0; s < e.states; ++s)
            if (truth(e.membership(s, i))) raw[i].push_back(s);

    std::vector<std::uint32_t> renumber(e.classes, UINT32_MAX);
    CompatibleCover f;
    for (std::size_t i = 0; i < e.classes; ++i)
        if (!raw[i].empty()) {
            renumber[i] = static_cast<std::uint32_t>(f.classes.size());
            f.classes.push_back(raw[i]);
        }
    f.succ.assign(f.classes.size() * e.inputs, 0);
    for (std::size_t i = 0; i < e.classes; ++i) {
        if (renumber[i] == UINT32_MAX) continue;
        for (Symbol y = 0; y < e.inputs; ++y) {
            std::uint32_t target = renumber[i];
            for (std::size_t j = 0; j < e.classes; ++j)
                if (renumber[j] != UINT32_MAX && truth(e.successor(i, j, y))) {
                    target = renumber[j];
                    break;
                }
            f.succ[renumber[i] * e.inputs + y] = target;
        }
    }
    return f;
}

MealyMachine cover_to_machine(const CompatibleCover& f, const ObservationMachine& m) {
    const std::size_t ny = m.inputs().size();
    const std::size_t k = f.size();
    if (k == 0) throw InvalidArgument("empty cover");
    if (f.succ.size() != k * ny) throw InvalidArgument("successor table has the wrong size");

    std::vector<std::vector<char>> member(k, std::vector<char>(m.state_count(), 0));
    std::optional<StateId> initial;
    for (std::size_t i = 0; i < k; ++i)
        for (StateId s : f.classes[i]) {
            if (s >= m.state_count()) throw InvalidArgument("cover names an unknown state");
            member[i][s] = 1;
            if (s == m.initial() && !initial) initial = static_cast<StateId>(i);
        }
    if (!initial) throw InvalidArgument("no class contains the initial state");

    std::vector<StateId> next(k * ny);
    std::vector<Symbol> out(k * ny, 0);
    for (std::size_t i = 0; i < k; ++i)
        for (Symbol y = 0; y < ny; ++y) {
            std::uint32_t j = f.succ[i * ny + y];
            if (j >= k) throw InvalidArgument("successor index out of range");
            next[i * ny + y] = j;
            bool have_output = false;
            for (StateId s : f.classes[i]) {
                if (!m.defined(s, y)) continue;
                for (StateId t : m.successors(s, y))
                    if (!member[j][t])
                        throw InvalidArgument("closure violation: class " + std::to_string(i) + " under " +
                                              m.inputs().name(y));
                if (!have_output) {
                    out[i * ny + y] = m.output(s, y);
                    have_output = true;
                }
            }
        }
    return MealyMachine(m.inputs(), m.outputs(), indexed_names(k, "c"), *initial, std::move(next), std::move(out));
}

CompatibleCover machine_to_cover(const MealyMachine& n, const ObservationMachine& m) {
    auto verdict = implements(n, m);
    if (!verdict.implements)
        throw InvalidArgument("machine does not implement the specification (differs on '" +
                              format_word(m.inputs(), *verdict.witness) + "')");
    const std::size_t ny = m.inputs().size();
    const std::size_t ms = m.state_count();

    std::vector<char> seen(n.state_count() * ms, 0);
    std::vector<std::pair<StateId, StateId>> queue{{n.initial(), m.initial()}};
    seen[n.initial() * ms + m.initial()] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [a, b] = queue[head];
        for (Symbol y = 0; y < ny; ++y)
            for (StateId t : m.successors(b, y)) {
                StateId a2 = n.next(a, y);
                if (!seen[a2 * ms + t]) {
                    seen[a2 * ms + t] = 1;
                    queue.emplace_back(a2, t);
                }
            }
    }

    std::vector<std::uint32_t> class_of(n.state_count(), UINT32_MAX);
    CompatibleCover f;
    for (StateId a = 0; a < n.state_count(); ++a) {
        std::vector<StateId> q;
        for (StateId b = 0; b < ms; ++b)
            if (seen[a * ms + b]) q.push_back(b);
        if (q.empty()) continue;
        auto it = std::find(f.classes.begin(), f.classes.end(), q);
        if (it == f.classes.end()) {
            class_of[a] = static_cast<std::uint32_t>(f.classes.size());
            f.classes.push_back(std::move(q));
        } else {
            class_of[a] = static_cast<std::uint32_t>(it - f.classes.begin());
        }
    }

    // Successors come from the first machine state mapped to each class.
    f.succ.assign(f.classes.size() * ny, UINT32_MAX);
    for (StateId a = 0; a < n.state_count(); ++a) {
        std::uint32_t c = class_of[a];
        if (c == UINT32_MAX || f.succ[c * ny] != UINT32_MAX) continue;
        for (Symbol y = 0; y < ny; ++y) {
            std::uint32_t target = class_of[n.next(a, y)];
            f.succ[c * ny + y] = target == UINT32_MAX ? c : target;
        }
    }
    return f;
}

MinimizeResult minimize_om(const ObservationMachine& input, const MinimizeOptions& options) {
    require_consistent(input, "minimize_om");
    // Unreachable states would distort the clique bound and the pinned classes.
    const ObservationMachine m = trim_unreachable(input);

    MinimizeStats stats;
    stats.om_states = m.state_count();
    const CompatibilityRelation rel = incompatibility(m);
    const PartialSolution partial = greedy_clique(rel);
    stats.clique_size = partial.clique.size();

    std::optional<MealyMachine> witness = options.witness;
    if (witness) {
        auto verdict = implements(*witness, m);
        if (!verdict.implements) throw InvalidArgument("witness does not implement the specification");
        if (witness->state_count() == stats.clique_size) {
            stats.skipped_encoding = true;
            stats.returned_witness = true;
            return {*witness, stats};
        }
    }

    EncodeLimits limits = options.limits;
    limits.deadline = options.deadline;
    for (std::size_t n = stats.clique_size;; ++n) {
        if (!witness && n > m.state_count())
            witness = options.fallback_witness ? options.fallback_witness() : determinize(m);
        if (witness && n >= witness->state_count()) {
            stats.returned_witness = true;
            return {*witness, stats};
        }
        if (options.deadline.expired()) throw Timeout("minimization timed out", n);

        CoverEncoding encoding = encode_cover(m, n, rel, partial, limits);
        if (options.on_encoding) options.on_encoding(n, encoding.cnf);
        ++stats.sat_calls;
        SatOutcome outcome = solve(encoding.cnf, options.deadline, options.solver);
        if (outcome.status == SatStatus::timeout)
            throw Timeout("minimization timed out with " + std::to_string(n) + " classes", n);
        if (outcome.status == SatStatus::sat)
            return {cover_to_machine(decode_cover(outcome.model, encoding), m), stats};
    }
}

namespace {

// Tail states reachable behind the head, with transitions the head never
// exercises redirected to self-loops, then classically minimised.
MealyMachine reduce_behind_head(const MealyMachine& h, const MealyMachine& t) {
    const std::size_t nx = h.inputs().size();
    const std::size_t ny = t.inputs().size();
    const std::size_t ts = t.state_count();
    std::vector<char> seen(h.state_count() * ts, 0);
    std::vector<char> used(ts * ny, 0);
    std::vector<std::pair<StateId, StateId>> queue{{h.initial(), t.initial()}};
    seen[h.initial() * ts + t.initial()] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
        auto [a, b] = queue[head];
        for (Symbol x = 0; x < nx; ++x) {
            Symbol y = h.output(a, x);
            used[b * ny + y] = 1;
            StateId a2 = h.next(a, x), b2 = t.next(b, y);
            if (!seen[a2 * ts + b2]) {
                seen[a2 * ts + b2] = 1;
                queue.emplace_back(a2, b2);
            }
        }
    }
    std::vector<StateId> next = t.next_table();
    for (StateId s = 0; s < ts; ++s)
        for (Symbol y = 0; y < ny; ++y)
            if (!used[s * ny + y]) next[s * ny + y] = s;
    MealyMachine pruned(t.inputs(), t.outputs(), t.state_names(), t.initial(), std::move(next), t.output_table());
    return minimize_complete(pruned);
}

}  // namespace

TailResult minimize_tail(const MealyMachine& h, const MealyMachine& t, const MinimizeOptions& options) {
    if (!(t.inputs() == h.outputs())) throw AlphabetMismatch("tail inputs differ from head outputs");
    const ObservationMachine m = restriction(t, image_automaton(h));

    MinimizeOptions opts = options;
    MealyMachine reduced = reduce_behind_head(h, t);
    opts.witness = reduced.state_count() < t.state_count() ? std::move(reduced) : t;
    MinimizeResult r = minimize_om(m, opts);
    return {std::move(r.machine), r.stats, r.stats.clique_size == t.state_count()};
}

NaiveEncoding encode_replacement_naive(const MealyMachine& h, const MealyMachine& t, std::size_t states,
                                       const EncodeLimits& limits) {
    if (!(t.inputs() == h.outputs())) throw AlphabetMismatch("tail inputs differ from head outputs");
    if (states == 0) throw InvalidArgument("candidate size must be positive");

    const std::size_t nx = h.inputs().size();
    const std::size_t ny = t.inputs().size();
    const std::size_t nz = t.outputs().size();
    const std::size_t ts = t.state_count();

    // Reachable product states and their distinct (y, z, successor) moves.
    std::vector<std::uint32_t> index(h.state_count() * ts, UINT32_MAX);
    std::vector<std::pair<StateId, StateId>> product{{h.initial(), t.initial()}};
    index[h.initial() * ts + t.initial()] = 0;
    struct Move {
        Symbol y, z;
        std::uint32_t to;
        auto operator<=>(const Move&) const = default;
    };
    std::vector<std::vector<Move>> moves;
    for (std::size_t p = 0; p < product.size(); ++p) {
        auto [a, b] = product[p];
        std::vector<Move> mv;
        for (Symbol x = 0; x < nx; ++x) {
            Symbol y = h.output(a, x);
            StateId a2 = h.next(a, x), b2 = t.next(b, y);
            std::uint32_t& slot = index[a2 * ts + b2];
            if (slot == UINT32_MAX) {
                slot = static_cast<std::uint32_t>(product.size());
                product.emplace_back(a2, b2);
            }
            mv.push_back({y, t.output(b, y), slot});
        }
        std::sort(mv.begin(), mv.end());
        mv.erase(std::unique(mv.begin(), mv.end()), mv.end());
        moves.push_back(std::move(mv));
    }

    NaiveEncoding e;
    e.states = states;
    e.inputs = ny;
    e.outputs = nz;
    e.product_states = product.size();
    const std::size_t n = states;
    e.d_base = e.cnf.new_vars(checked_var_count(n * ny * n));
    e.o_base = e.cnf.new_vars(checked_var_count(n * ny * nz));
    e.r_base = e.cnf.new_vars(checked_var_count(product.size() * n));

    e.cnf.add_clause({e.pairing(0, 0)});
    for (std::size_t p = 0; p < product.size(); ++p) {
        for (const Move& mv : moves[p])
            for (std::size_t q = 0; q < n; ++q) {
                e.cnf.add_clause({-e.pairing(p, q), e.output(q, mv.y, mv.z)});
                for (std::size_t q2 = 0; q2 < n; ++q2)
                    e.cnf.add_clause({-e.pairing(p, q), -e.transition(q, mv.y, q2), e.pairing(mv.to, q2)});
            }
        if ((p & 15) == 15) check_limits(limits, e.cnf, n);
    }
    std::vector<int> clause;
    for (std::size_t q = 0; q < n; ++q)
        for (Symbol y = 0; y < ny; ++y) {
            clause.clear();
            for (std::size_t q2 = 0; q2 < n; ++q2) clause.push_back(e.transition(q, y, q2));
            e.cnf.add_clause(clause);
            clause.clear();
            for (Symbol z = 0; z < nz; ++z) clause.push_back(e.output(q, y, z));
            e.cnf.add_clause(clause);
            for (Symbol z1 = 0; z1 < nz; ++z1)
                for (Symbol z2 = z1 + 1; z2 < nz; ++z2)
                    e.cnf.add_clause({-e.output(q, y, z1), -e.output(q, y, z2)});
        }
    check_limits(limits, e.cnf, n);
    return e;
}

MealyMachine decode_naive(const std::vector<bool>& model, const NaiveEncoding& e, const MealyMachine& t) {
    auto truth = [&](int v) { return static_cast<std::size_t>(v) < model.size() && model[static_cast<std::size_t>(v)]; };
    const std::size_t n = e.states, ny = e.inputs;
    std::vector<StateId> next(n * ny);
    std::vector<Symbol> out(n * ny, 0);
    for (std::size_t q = 0; q < n; ++q)
        for (Symbol y = 0; y < ny; ++y) {
            next[q * ny + y] = static_cast<StateId>(q);
            for (std::size_t q2 = 0; q2 < n; ++q2)
                if (truth(e.transition(q, y, q2))) {
                    next[q * ny + y] = static_cast<StateId>(q2);
                    break;
                }
            for (Symbol z = 0; z < e.outputs; ++z)
                if (truth(e.output(q, y, z))) {
                    out[q * ny + y] = z;
                    break;
                }
        }
    return MealyMachine(t.inputs(), t.outputs(), indexed_names(n, "q"), 0, std::move(next), std::move(out));
}

NaiveResult minimize_tail_naive(const MealyMachine& h, const MealyMachine& t, const NaiveOptions& options) {
    EncodeLimits limits = options.limits;
    limits.deadline = options.deadline;
    NaiveResult result{t, 0};
    for (std::size_t n = 1; n <= t.state_count(); ++n) {
        if (options.deadline.expired()) throw Timeout("naive search timed out", n);
        NaiveEncoding encoding = encode_replacement_naive(h, t, n, limits);
        if (options.on_encoding) options.on_encoding(n, encoding.cnf);
        ++result.sat_calls;
        SatOutcome outcome = solve(encoding.cnf, options.deadline, options.solver);
        if (outcome.status == SatStatus::timeout)
            throw Timeout("naive search timed out with " + std::to_string(n) + " states", n);
        if (outcome.status == SatStatus::sat) {
            result.machine = decode_naive(outcome.model, encoding, t);
            return result;
        }
    }
    return result;
}

bool verify_replacement(const MealyMachine& h, const MealyMachine& t, const MealyMachine& candidate) {
    return equivalent(compose_cascade(h, t), compose_cascade(h, candidate)).equivalent;
}

}  // namespace tailopt
