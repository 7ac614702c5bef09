#include "tailopt/mealy_ops.hpp"

#include <algorithm>
#include <map>
#include <queue>

#include "tailopt/error.hpp"

namespace tailopt {

namespace {

void check_word(const Alphabet& a, std::span<const Symbol> word) {
    for (Symbol x : word)
        if (x >= a.size()) throw UnknownSymbol("input symbol index " + std::to_string(x) + " out of range");
}

}  // namespace

Word run_machine(const MealyMachine& m, std::span<const Symbol> word) {
    check_word(m.inputs(), word);
    Word out;
    out.reserve(word.size());
    StateId s = m.initial();
    for (Symbol x : word) {
        out.push_back(m.output(s, x));
        s = m.next(s, x);
    }
    return out;
}

Run run_trace(const MealyMachine& m, std::span<const Symbol> word) {
    check_word(m.inputs(), word);
    Run run;
    run.states.push_back(m.initial());
    for (Symbol x : word) {
        StateId s = run.states.back();
        run.inputs.push_back(x);
        run.outputs.push_back(m.output(s, x));
        run.states.push_back(m.next(s, x));
    }
    return run;
}

MealyMachine compose_cascade(const MealyMachine& h, const MealyMachine& t) {
    if (!(t.inputs() == h.outputs()))
        throw AlphabetMismatch("compose_cascade: tail inputs differ from head outputs");
    const std::size_t n_in = h.inputs().size();
    const std::size_t n_t = t.state_count();
    std::vector<StateId> index(h.state_count() * n_t, UINT32_MAX);
    std::vector<std::pair<StateId, StateId>> pairs;
    auto intern = [&](StateId sh, StateId st) {
        StateId& slot = index[sh * n_t + st];
        if (slot == UINT32_MAX) {
            slot = static_cast<StateId>(pairs.size());
            pairs.emplace_back(sh, st);
        }
        return slot;
    };
    intern(h.initial(), t.initial());
    std::vector<StateId> next;
    std::vector<Symbol> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        auto [sh, st] = pairs[i];
        for (Symbol x = 0; x < n_in; ++x) {
            Symbol y = h.output(sh, x);
            out.push_back(t.output(st, y));
            next.push_back(intern(h.next(sh, x), t.next(st, y)));
        }
    }
    std::vector<std::string> names;
    names.reserve(pairs.size());
    for (auto [sh, st] : pairs) names.push_back(h.state_names()[sh] + "." + t.state_names()[st]);
    // Joined names can collide when state names contain '.'; fall back to indices.
    std::vector<std::string> sorted = names;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) names = indexed_names(pairs.size(), "q");
    return MealyMachine(h.inputs(), t.outputs(), std::move(names), 0, std::move(next), std::move(out));
}

Equivalence equivalent(const MealyMachine& a, const MealyMachine& b) {
    if (!(a.inputs() == b.inputs()) || !(a.outputs() == b.outputs()))
        throw AlphabetMismatch("equivalent: machines must share both alphabets");
    const std::size_t n_in = a.inputs().size();
    const std::size_t nb = b.state_count();
    struct Parent {
        std::uint64_t from;
        Symbol via;
    };
    constexpr std::uint64_t unseen = UINT64_MAX;
    std::vector<Parent> parent(a.state_count() * nb, Parent{unseen, 0});
    const std::uint64_t root = std::uint64_t{a.initial()} * nb + b.initial();
    parent[root] = {root, 0};
    std::queue<std::uint64_t> queue;
    queue.push(root);

    auto path_to = [&](std::uint64_t node) {
        Word w;
        while (node != root) {
            w.push_back(parent[node].via);
            node = parent[node].from;
        }
        std::reverse(w.begin(), w.end());
        return w;
    };

    while (!queue.empty()) {
        std::uint64_t node = queue.front();
        queue.pop();
        auto sa = static_cast<StateId>(node / nb), sb = static_cast<StateId>(node % nb);
        for (Symbol x = 0; x < n_in; ++x) {
            if (a.output(sa, x) != b.output(sb, x)) {
                Word w = path_to(node);
                w.push_back(x);
                return {false, std::move(w)};
            }
            std::uint64_t succ = std::uint64_t{a.next(sa, x)} * nb + b.next(sb, x);
            if (parent[succ].from == unseen) {
                parent[succ] = {node, x};
                queue.push(succ);
            }
        }
    }
    return {true, std::nullopt};
}

MealyMachine trim_unreachable(const MealyMachine& m) {
    const std::size_t n_in = m.inputs().size();
    std::vector<StateId> index(m.state_count(), UINT32_MAX);
    std::vector<StateId> order{m.initial()};
    index[m.initial()] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (Symbol x = 0; x < n_in; ++x) {
            StateId t = m.next(order[i], x);
            if (index[t] == UINT32_MAX) {
                index[t] = static_cast<StateId>(order.size());
                order.push_back(t);
            }
        }
    std::vector<std::string> names;
    std::vector<StateId> next;
    std::vector<Symbol> out;
    for (StateId s : order) {
        names.push_back(m.state_names()[s]);
        for (Symbol x = 0; x < n_in; ++x) {
            next.push_back(index[m.next(s, x)]);
            out.push_back(m.output(s, x));
        }
    }
    return MealyMachine(m.inputs(), m.outputs(), std::move(names), 0, std::move(next), std::move(out));
}

MealyMachine minimize_complete(const MealyMachine& input) {
    MealyMachine m = trim_unreachable(input);
    const std::size_t n = m.state_count(), n_in = m.inputs().size();
    // Moore-style refinement: blocks are keyed by (old block, output row,
    // successor blocks) until the block count stabilises.
    std::vector<StateId> block(n, 0);
    std::size_t block_count = 0;
    {
        std::map<std::vector<Symbol>, StateId> rows;
        for (StateId s = 0; s < n; ++s) {
            std::vector<Symbol> row(m.output_table().begin() + s * n_in, m.output_table().begin() + (s + 1) * n_in);
            auto [it, fresh] = rows.emplace(std::move(row), static_cast<StateId>(rows.size()));
            block[s] = it->second;
        }
        block_count = rows.size();
    }
    while (true) {
        std::map<std::vector<StateId>, StateId> keys;
        std::vector<StateId> refined(n);
        for (StateId s = 0; s < n; ++s) {
            std::vector<StateId> key{block[s]};
            for (Symbol x = 0; x < n_in; ++x) key.push_back(block[m.next(s, x)]);
            auto [it, fresh] = keys.emplace(std::move(key), static_cast<StateId>(keys.size()));
            refined[s] = it->second;
        }
        block.swap(refined);
        if (keys.size() == block_count) break;
        block_count = keys.size();
    }
    // Renumber blocks by first occurrence so the initial state's block is 0.
    std::vector<StateId> renumber(block_count, UINT32_MAX);
    std::vector<StateId> representative;
    for (StateId s = 0; s < n; ++s)
        if (renumber[block[s]] == UINT32_MAX) {
            renumber[block[s]] = static_cast<StateId>(representative.size());
            representative.push_back(s);
        }
    std::vector<std::string> names;
    std::vector<StateId> next;
    std::vector<Symbol> out;
    for (StateId rep : representative) {
        names.push_back(m.state_names()[rep]);
        for (Symbol x = 0; x < n_in; ++x) {
            next.push_back(renumber[block[m.next(rep, x)]]);
            out.push_back(m.output(rep, x));
        }
    }
    return MealyMachine(m.inputs(), m.outputs(), std::move(names), 0, std::move(next), std::move(out));
}

MealyMachine identity_machine(const Alphabet& alphabet) {
    std::vector<StateId> next(alphabet.size(), 0);
    std::vector<Symbol> out(alphabet.size());
    for (Symbol x = 0; x < alphabet.size(); ++x) out[x] = x;
    return MealyMachine(alphabet, alphabet, {"id"}, 0, std::move(next), std::move(out));
}

}  // namespace tailopt
