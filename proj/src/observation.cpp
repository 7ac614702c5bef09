#include "tailopt/observation.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "tailopt/error.hpp"

namespace tailopt {

namespace {

struct Parent {
    std::uint64_t from = UINT64_MAX;
    Symbol via = 0;
};

Word trace_back(const std::vector<Parent>& parent, std::uint64_t node, std::uint64_t root) {
    Word w;
    while (node != root) {
        w.push_back(parent[node].via);
        node = parent[node].from;
    }
    std::reverse(w.begin(), w.end());
    return w;
}

}  // namespace

Consistency is_consistent(const ObservationMachine& m) {
    const std::size_t n = m.state_count();
    const std::size_t n_in = m.inputs().size();
    // Unordered pairs suffice: (a, b) and (b, a) see the same words.
    auto key = [](StateId a, StateId b) -> std::uint32_t {
        if (a > b) std::swap(a, b);
        return static_cast<std::uint32_t>(std::uint64_t{b} * (b + 1) / 2 + a);
    };
    struct Link {
        std::uint32_t from = UINT32_MAX;
        Symbol via = 0;
        StateId a = 0, b = 0;
    };
    std::vector<Link> parent(n * (n + 1) / 2);
    const std::uint32_t root = key(m.initial(), m.initial());
    parent[root] = {root, 0, m.initial(), m.initial()};
    std::queue<std::uint32_t> queue;
    queue.push(root);
    while (!queue.empty()) {
        const std::uint32_t node = queue.front();
        queue.pop();
        const StateId a = parent[node].a, b = parent[node].b;
        for (Symbol y = 0; y < n_in; ++y) {
            if (!m.defined(a, y) || !m.defined(b, y)) continue;
            if (m.output(a, y) != m.output(b, y)) {
                Word w{y};
                for (std::uint32_t at = node; at != root; at = parent[at].from) w.push_back(parent[at].via);
                std::reverse(w.begin(), w.end());
                return {false, std::move(w)};
            }
            for (StateId a2 : m.successors(a, y))
                for (StateId b2 : m.successors(b, y)) {
                    const std::uint32_t succ = key(a2, b2);
                    if (parent[succ].from == UINT32_MAX) {
                        parent[succ] = {node, y, a2, b2};
                        queue.push(succ);
                    }
                }
        }
    }
    return {true, std::nullopt};
}

void require_consistent(const ObservationMachine& m, const char* context) {
    auto c = is_consistent(m);
    if (!c.consistent)
        throw InconsistentMachine(std::string(context) + ": observation machine is inconsistent on word '" +
                                  format_word(m.inputs(), *c.witness) + "'");
}

Implementation implements(const MealyMachine& n, const ObservationMachine& m) {
    if (!(n.inputs() == m.inputs()) || !(n.outputs() == m.outputs()))
        throw AlphabetMismatch("implements: machines must share both alphabets");
    require_consistent(m, "implements");
    const std::uint64_t nm = m.state_count();
    const std::size_t n_in = m.inputs().size();
    std::vector<Parent> parent(n.state_count() * nm);
    const std::uint64_t root = std::uint64_t{n.initial()} * nm + m.initial();
    parent[root] = {root, 0};
    std::queue<std::uint64_t> queue;
    queue.push(root);
    while (!queue.empty()) {
        std::uint64_t node = queue.front();
        queue.pop();
        auto sn = static_cast<StateId>(node / nm), sm = static_cast<StateId>(node % nm);
        for (Symbol y = 0; y < n_in; ++y) {
            if (!m.defined(sm, y)) continue;
            if (n.output(sn, y) != m.output(sm, y)) {
                Word w = trace_back(parent, node, root);
                w.push_back(y);
                return {false, std::move(w)};
            }
            StateId sn2 = n.next(sn, y);
            for (StateId sm2 : m.successors(sm, y)) {
                std::uint64_t succ = std::uint64_t{sn2} * nm + sm2;
                if (parent[succ].from == UINT64_MAX) {
                    parent[succ] = {node, y};
                    queue.push(succ);
                }
            }
        }
    }
    return {true, std::nullopt};
}

std::vector<StateId> reach(const ObservationMachine& m, std::span<const Symbol> word) {
    std::vector<StateId> current{m.initial()};
    for (Symbol y : word) {
        std::vector<StateId> next;
        for (StateId s : current)
            if (m.defined(s, y)) next.insert(next.end(), m.successors(s, y).begin(), m.successors(s, y).end());
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        if (next.empty()) return {};
        current.swap(next);
    }
    return current;
}

std::optional<Word> om_output(const ObservationMachine& m, std::span<const Symbol> word) {
    std::vector<StateId> current{m.initial()};
    Word out;
    for (Symbol y : word) {
        std::vector<StateId> next;
        std::optional<Symbol> z;
        for (StateId s : current) {
            if (!m.defined(s, y)) continue;
            if (!z) z = m.output(s, y);
            next.insert(next.end(), m.successors(s, y).begin(), m.successors(s, y).end());
        }
        if (!z) return std::nullopt;
        out.push_back(*z);
        std::sort(next.begin(), next.end());
        next.erase(std::unique(next.begin(), next.end()), next.end());
        current.swap(next);
    }
    return out;
}

Nfa image_automaton(const MealyMachine& h) {
    const std::size_t n_in = h.inputs().size(), n_out = h.outputs().size();
    std::vector<std::vector<StateId>> delta(h.state_count() * n_out);
    for (StateId s = 0; s < h.state_count(); ++s)
        for (Symbol x = 0; x < n_in; ++x) delta[s * n_out + h.output(s, x)].push_back(h.next(s, x));
    return Nfa(h.outputs(), h.state_names(), h.initial(), std::move(delta));
}

ObservationMachine restriction(const MealyMachine& t, const Nfa& a) {
    if (!(t.inputs() == a.alphabet())) throw AlphabetMismatch("restriction: tail inputs differ from the automaton alphabet");
    const std::size_t n_in = t.inputs().size();
    const std::size_t na = a.state_count();
    std::vector<StateId> index(t.state_count() * na, UINT32_MAX);
    std::vector<std::pair<StateId, StateId>> pairs;
    auto intern = [&](StateId st, StateId sa) {
        StateId& slot = index[st * na + sa];
        if (slot == UINT32_MAX) {
            slot = static_cast<StateId>(pairs.size());
            pairs.emplace_back(st, sa);
        }
        return slot;
    };
    intern(t.initial(), a.initial());
    std::vector<std::vector<StateId>> delta;
    std::vector<Symbol> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [st, sa] = pairs[i];
        for (Symbol y = 0; y < n_in; ++y) {
            std::vector<StateId> targets;
            const StateId st2 = t.next(st, y);
            for (StateId sa2 : a.successors(sa, y)) targets.push_back(intern(st2, sa2));
            delta.push_back(std::move(targets));
            out.push_back(t.output(st, y));
        }
    }
    std::vector<std::string> names;
    names.reserve(pairs.size());
    for (auto [st, sa] : pairs) names.push_back(t.state_names()[st] + "." + a.state_names()[sa]);
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) names = indexed_names(pairs.size(), "q");
    return ObservationMachine(t.inputs(), t.outputs(), std::move(names), 0, std::move(delta), std::move(out));
}

ObservationMachine trim_unreachable(const ObservationMachine& m) {
    const std::size_t n_in = m.inputs().size();
    std::vector<char> seen(m.state_count(), 0);
    std::vector<StateId> stack{m.initial()};
    seen[m.initial()] = 1;
    while (!stack.empty()) {
        StateId s = stack.back();
        stack.pop_back();
        for (Symbol y = 0; y < n_in; ++y)
            for (StateId t : m.successors(s, y))
                if (!seen[t]) seen[t] = 1, stack.push_back(t);
    }
    std::vector<StateId> index(m.state_count(), UINT32_MAX);
    std::vector<std::string> names;
    for (StateId s = 0; s < m.state_count(); ++s)
        if (seen[s]) {
            index[s] = static_cast<StateId>(names.size());
            names.push_back(m.state_names()[s]);
        }
    if (names.size() == m.state_count()) return m;
    std::vector<std::vector<StateId>> delta;
    std::vector<Symbol> out;
    for (StateId s = 0; s < m.state_count(); ++s) {
        if (!seen[s]) continue;
        for (Symbol y = 0; y < n_in; ++y) {
            std::vector<StateId> targets;
            for (StateId t : m.successors(s, y)) targets.push_back(index[t]);
            delta.push_back(std::move(targets));
            out.push_back(m.output(s, y));
        }
    }
    return ObservationMachine(m.inputs(), m.outputs(), std::move(names), index[m.initial()], std::move(delta),
                              std::move(out));
}

MealyMachine determinize(const ObservationMachine& m, std::size_t state_cap) {
    require_consistent(m, "determinize");
    const std::size_t n_in = m.inputs().size();
    std::map<std::vector<StateId>, StateId> index;
    std::vector<std::vector<StateId>> subsets{{m.initial()}};
    index.emplace(subsets[0], 0);
    std::vector<StateId> next;
    std::vector<Symbol> out;
    for (std::size_t i = 0; i < subsets.size(); ++i) {
        for (Symbol y = 0; y < n_in; ++y) {
            std::vector<StateId> target;
            std::optional<Symbol> z;
            for (StateId s : subsets[i]) {
                if (!m.defined(s, y)) continue;
                if (!z) z = m.output(s, y);
                target.insert(target.end(), m.successors(s, y).begin(), m.successors(s, y).end());
            }
            if (!z) {
                next.push_back(static_cast<StateId>(i));
                out.push_back(0);
                continue;
            }
            std::sort(target.begin(), target.end());
            target.erase(std::unique(target.begin(), target.end()), target.end());
            auto [it, fresh] = index.emplace(target, static_cast<StateId>(subsets.size()));
            if (fresh) {
                if (subsets.size() >= state_cap)
                    throw TooLarge("solution too large: more than " + std::to_string(state_cap) + " states");
                subsets.push_back(std::move(target));
            }
            next.push_back(it->second);
            out.push_back(*z);
        }
    }
    return MealyMachine(m.inputs(), m.outputs(), indexed_names(subsets.size(), "d"), 0, std::move(next),
                        std::move(out));
}

}  // namespace tailopt
