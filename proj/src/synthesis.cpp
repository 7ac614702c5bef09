#include "tailopt/synthesis.hpp"

#include <algorithm>
#include <unordered_map>

#include "tailopt/error.hpp"
#include "tailopt/observation.hpp"

namespace tailopt {

FeasibilityVerdict feasible(const MealyMachine& h, const MealyMachine& m) {
    if (!(h.inputs() == m.inputs())) throw AlphabetMismatch("head and model read different input alphabets");
    const std::size_t nx = h.inputs().size();
    const std::uint64_t hs = h.state_count(), ms = m.state_count();
    auto key = [&](StateId a, StateId b, StateId c, StateId d) {
        return ((std::uint64_t{a} * ms + b) * hs + c) * ms + d;
    };
    struct Node {
        StateId h1, m1, h2, m2;
        std::size_t parent;
        Symbol x1, x2;
    };
    std::vector<Node> nodes{{h.initial(), m.initial(), h.initial(), m.initial(), SIZE_MAX, 0, 0}};
    std::unordered_map<std::uint64_t, std::size_t> seen{{key(h.initial(), m.initial(), h.initial(), m.initial()), 0}};

    auto trace = [&](std::size_t i, Symbol x1, Symbol x2) {
        Word w1{x1}, w2{x2};
        for (; nodes[i].parent != SIZE_MAX; i = nodes[i].parent) {
            w1.push_back(nodes[i].x1);
            w2.push_back(nodes[i].x2);
        }
        std::reverse(w1.begin(), w1.end());
        std::reverse(w2.begin(), w2.end());
        return std::make_pair(std::move(w1), std::move(w2));
    };

    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const Node cur = nodes[i];
        for (Symbol x1 = 0; x1 < nx; ++x1)
            for (Symbol x2 = 0; x2 < nx; ++x2) {
                if (h.output(cur.h1, x1) != h.output(cur.h2, x2)) continue;
                if (m.output(cur.m1, x1) != m.output(cur.m2, x2)) return {false, trace(i, x1, x2)};
                Node next{h.next(cur.h1, x1), m.next(cur.m1, x1), h.next(cur.h2, x2), m.next(cur.m2, x2), i, x1, x2};
                if (seen.emplace(key(next.h1, next.m1, next.h2, next.m2), nodes.size()).second) nodes.push_back(next);
            }
    }
    return {};
}

ObservationMachine solution_om(const MealyMachine& h, const MealyMachine& m) {
    FeasibilityVerdict verdict = feasible(h, m);
    if (!verdict.feasible)
        throw InvalidArgument("no tail solves the equation: inputs '" +
                              format_word(h.inputs(), verdict.witness->first) + "' and '" +
                              format_word(h.inputs(), verdict.witness->second) +
                              "' look the same to the tail but need different outputs");

    const std::size_t nx = h.inputs().size();
    const std::size_t ny = h.outputs().size();
    const std::size_t ms = m.state_count();
    std::vector<std::uint32_t> index(h.state_count() * ms, UINT32_MAX);
    std::vector<std::pair<StateId, StateId>> pairs{{h.initial(), m.initial()}};
    index[h.initial() * ms + m.initial()] = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [a, b] = pairs[i];
        for (Symbol x = 0; x < nx; ++x) {
            std::uint32_t& slot = index[h.next(a, x) * ms + m.next(b, x)];
            if (slot == UINT32_MAX) {
                slot = static_cast<std::uint32_t>(pairs.size());
                pairs.emplace_back(h.next(a, x), m.next(b, x));
            }
        }
    }

    std::vector<std::vector<StateId>> delta(pairs.size() * ny);
    std::vector<Symbol> out(pairs.size() * ny, 0);
    std::vector<std::string> names;
    names.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [a, b] = pairs[i];
        names.push_back(h.state_names()[a] + "." + m.state_names()[b]);
        for (Symbol x = 0; x < nx; ++x) {
            Symbol y = h.output(a, x);
            delta[i * ny + y].push_back(index[h.next(a, x) * ms + m.next(b, x)]);
            out[i * ny + y] = m.output(b, x);
        }
    }
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) names = indexed_names(pairs.size(), "q");
    return ObservationMachine(h.outputs(), m.outputs(), std::move(names), 0, std::move(delta), std::move(out));
}

MealyMachine some_solution(const MealyMachine& h, const MealyMachine& m, std::size_t state_cap) {
    return determinize(solution_om(h, m), state_cap);
}

MinimizeResult minimal_solution(const MealyMachine& h, const MealyMachine& m, const MinimizeOptions& options,
                                std::size_t state_cap) {
    const ObservationMachine om = solution_om(h, m);
    MinimizeOptions opts = options;
    if (!opts.fallback_witness) opts.fallback_witness = [&om, state_cap] { return determinize(om, state_cap); };
    return minimize_om(om, opts);
}

}  // namespace tailopt
