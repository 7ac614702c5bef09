#include "tailopt/generators.hpp"

#include <algorithm>
#include <numeric>

#include "tailopt/error.hpp"
#include "tailopt/observation.hpp"

namespace tailopt {

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("empty range");
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    std::uint64_t v;
    do v = rng();
    while (v > limit);
    return v % bound;
}

namespace {

MealyMachine draw_mealy(std::mt19937_64& rng, std::size_t states, const Alphabet& inputs, const Alphabet& outputs) {
    if (states == 0 || inputs.empty() || outputs.empty()) throw InvalidArgument("machine sizes must be positive");
    std::vector<StateId> next(states * inputs.size());
    std::vector<Symbol> out(states * inputs.size());
    for (std::size_t k = 0; k < next.size(); ++k) {
        next[k] = static_cast<StateId>(uniform_below(rng, states));
        out[k] = static_cast<Symbol>(uniform_below(rng, outputs.size()));
    }
    return MealyMachine(inputs, outputs, indexed_names(states), 0, std::move(next), std::move(out));
}

}  // namespace

MealyMachine random_mealy(std::size_t states, const Alphabet& inputs, const Alphabet& outputs, Seed seed) {
    std::mt19937_64 rng(seed);
    return draw_mealy(rng, states, inputs, outputs);
}

MealyMachine random_mealy(std::size_t states, std::size_t in_size, std::size_t out_size, Seed seed) {
    if (in_size == 0 || out_size == 0) throw InvalidArgument("alphabet sizes must be positive");
    return random_mealy(states, Alphabet(indexed_names(in_size, "x")), Alphabet(indexed_names(out_size, "y")), seed);
}

Cascade random_cascade(std::size_t head_states, std::size_t tail_states, std::size_t alpha, Seed seed) {
    if (alpha == 0) throw InvalidArgument("alphabet size must be positive");
    Alphabet x(indexed_names(alpha, "x")), y(indexed_names(alpha, "y")), z(indexed_names(alpha, "z"));
    std::mt19937_64 rng(seed);
    MealyMachine head = draw_mealy(rng, head_states, x, y);
    MealyMachine tail = draw_mealy(rng, tail_states, y, z);
    return {std::move(head), std::move(tail)};
}

ObservationMachine random_om(std::size_t states, std::size_t in_size, std::size_t out_size, std::size_t max_degree,
                             unsigned defined_percent, Seed seed) {
    if (states == 0 || in_size == 0 || out_size == 0 || max_degree == 0)
        throw InvalidArgument("machine sizes must be positive");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<StateId>> delta(states * in_size);
    std::vector<Symbol> out(states * in_size, 0);
    std::vector<StateId> pool(states);
    for (std::size_t k = 0; k < delta.size(); ++k) {
        if (uniform_below(rng, 100) >= defined_percent) continue;
        std::size_t degree = std::min<std::size_t>(1 + uniform_below(rng, max_degree), states);
        std::iota(pool.begin(), pool.end(), 0);
        for (std::size_t i = 0; i < degree; ++i) {
            std::swap(pool[i], pool[i + uniform_below(rng, states - i)]);
            delta[k].push_back(pool[i]);
        }
        out[k] = static_cast<Symbol>(uniform_below(rng, out_size));
    }
    return ObservationMachine(Alphabet(indexed_names(in_size, "y")), Alphabet(indexed_names(out_size, "z")),
                              indexed_names(states), 0, std::move(delta), std::move(out));
}

std::string fresh_symbol(std::string base, const std::vector<std::string>& taken) {
    while (std::find(taken.begin(), taken.end(), base) != taken.end()) base += '\'';
    return base;
}

namespace {

Alphabet with_symbol(const Alphabet& a, const std::string& base, Symbol& added) {
    std::vector<std::string> names = a.names();
    added = static_cast<Symbol>(names.size());
    names.push_back(fresh_symbol(base, names));
    return Alphabet(std::move(names));
}

}  // namespace

Cascade np_reduction(const ObservationMachine& n) {
    require_consistent(n, "np_reduction");
    if (n.degree() > 1) throw InvalidArgument("np_reduction needs a machine of degree at most 1");
    const std::size_t ns = n.state_count();
    const std::size_t ny = n.inputs().size();
    Symbol ybot = 0, zbot = 0;
    Alphabet yhat = with_symbol(n.inputs(), "bot", ybot);
    Alphabet zhat = with_symbol(n.outputs(), "bot", zbot);

    std::vector<std::string> head_states = n.state_names();
    head_states.push_back(fresh_symbol("sink", head_states));
    const StateId sink = static_cast<StateId>(ns);
    std::vector<StateId> hnext((ns + 1) * ny, sink);
    std::vector<Symbol> hout((ns + 1) * ny, ybot);
    for (StateId s = 0; s < ns; ++s)
        for (Symbol y = 0; y < ny; ++y)
            if (n.defined(s, y)) {
                hnext[s * ny + y] = n.successors(s, y).front();
                hout[s * ny + y] = y;
            }
    MealyMachine head(n.inputs(), yhat, std::move(head_states), n.initial(), std::move(hnext), std::move(hout));

    const std::size_t nyh = yhat.size();
    std::vector<StateId> tnext(ns * nyh);
    std::vector<Symbol> tout(ns * nyh, 0);
    for (StateId s = 0; s < ns; ++s) {
        for (Symbol y = 0; y < ny; ++y) {
            tnext[s * nyh + y] = n.defined(s, y) ? n.successors(s, y).front() : s;
            if (n.defined(s, y)) tout[s * nyh + y] = n.output(s, y);
        }
        tnext[s * nyh + ybot] = s;
        tout[s * nyh + ybot] = zbot;
    }
    MealyMachine tail(yhat, zhat, n.state_names(), n.initial(), std::move(tnext), std::move(tout));
    return {std::move(head), std::move(tail)};
}

SplitInstance split_om(const ObservationMachine& n) {
    require_consistent(n, "split_om");
    const std::size_t k = std::max<std::size_t>(1, n.degree());
    const std::size_t ns = n.state_count();
    const std::size_t ny = n.inputs().size();

    std::vector<std::string> xs;
    for (Symbol y = 0; y < ny; ++y)
        for (std::size_t l = 0; l < k; ++l) xs.push_back(n.inputs().name(y) + "." + std::to_string(l));
    Alphabet x(xs);
    Symbol ybot = 0, zbot = 0;
    Alphabet yhat = with_symbol(n.inputs(), "bot", ybot);
    Alphabet zhat = with_symbol(n.outputs(), "bot", zbot);

    std::vector<std::string> states = n.state_names();
    states.push_back(fresh_symbol("sink", states));
    const StateId sink = static_cast<StateId>(ns);
    const std::size_t nx = x.size();
    std::vector<StateId> next((ns + 1) * nx, sink);
    std::vector<Symbol> hout((ns + 1) * nx, ybot);
    std::vector<Symbol> mout((ns + 1) * nx, zbot);
    for (StateId s = 0; s < ns; ++s)
        for (Symbol y = 0; y < ny; ++y) {
            const auto& targets = n.successors(s, y);  // sorted, so label l is the l-th smallest target
            for (std::size_t l = 0; l < targets.size(); ++l) {
                std::size_t i = s * nx + y * k + l;
                next[i] = targets[l];
                hout[i] = y;
                mout[i] = n.output(s, y);
            }
        }
    MealyMachine head(x, yhat, states, n.initial(), next, std::move(hout));
    MealyMachine model(x, zhat, std::move(states), n.initial(), std::move(next), std::move(mout));
    return {std::move(head), std::move(model)};
}

ObservationMachine exp_family(std::size_t n) {
    if (n == 0) throw InvalidArgument("exp_family needs n >= 1");
    // Layout: prefix P_j, record chains R_{j,c,t}, reveal chains A_{c,m}, then a dead state.
    const std::size_t chain_count = n * (n - 1);
    const StateId p0 = 0;
    const StateId r0 = static_cast<StateId>(n);
    const StateId a0 = static_cast<StateId>(n + chain_count);
    const StateId dead = static_cast<StateId>(a0 + 2 * n);
    const std::size_t total = dead + 1;

    std::vector<std::size_t> chain_start(n, 0);  // offset of R_{j,a,j+1}
    for (std::size_t j = 0, off = 0; j + 1 < n; ++j) {
        chain_start[j] = off;
        off += 2 * (n - 1 - j);
    }
    auto record = [&](std::size_t j, Symbol c, std::size_t t) {
        return static_cast<StateId>(r0 + chain_start[j] + c * (n - 1 - j) + (t - j - 1));
    };
    auto reveal = [&](Symbol c, std::size_t m) { return static_cast<StateId>(a0 + c * n + m); };
    // Where the branch that recorded c at position j goes after reading position t-1.
    auto after = [&](std::size_t j, Symbol c, std::size_t t) { return t == n ? reveal(c, j) : record(j, c, t); };

    const Symbol a = 0, b = 1, top = 2;
    std::vector<std::string> names(total);
    std::vector<std::vector<StateId>> delta(total * 2);
    std::vector<Symbol> out(total * 2, 0);
    auto set = [&](StateId s, Symbol y, std::vector<StateId> to, Symbol z) {
        delta[s * 2 + y] = std::move(to);
        out[s * 2 + y] = z;
    };
    const char* sym = "ab";

    for (std::size_t j = 0; j < n; ++j) {
        names[p0 + j] = "p" + std::to_string(j);
        for (Symbol c : {a, b}) {
            std::vector<StateId> to{after(j, c, j + 1)};
            if (j + 1 < n) to.push_back(static_cast<StateId>(p0 + j + 1));
            set(static_cast<StateId>(p0 + j), c, std::move(to), top);
        }
    }
    for (std::size_t j = 0; j + 1 < n; ++j)
        for (Symbol c : {a, b})
            for (std::size_t t = j + 1; t < n; ++t) {
                StateId s = record(j, c, t);
                names[s] = "r" + std::to_string(j) + sym[c] + std::to_string(t);
                for (Symbol y : {a, b}) set(s, y, {after(j, c, t + 1)}, top);
            }
    for (Symbol c : {a, b})
        for (std::size_t m = 0; m < n; ++m) {
            StateId s = reveal(c, m);
            names[s] = std::string("w") + sym[c] + std::to_string(m);
            if (m > 0) set(s, a, {reveal(c, m - 1)}, top);
            else set(s, b, {dead}, c);
        }
    names[dead] = "dead";
    return ObservationMachine(Alphabet({"a", "b"}), Alphabet({"a", "b", "top"}), std::move(names), p0,
                              std::move(delta), std::move(out));
}

}  // namespace tailopt
