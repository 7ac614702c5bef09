// End-to-end checks, one line of output per criterion.
//
//   acceptance            run everything
//   acceptance --only 4   run a single criterion

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "support.hpp"
#include "tailopt/bench.hpp"
#include "tailopt/error.hpp"
#include "tailopt/mealy_ops.hpp"
#include "tailopt/minimization.hpp"
#include "tailopt/observation.hpp"
#include "tailopt/synthesis.hpp"

using namespace tailopt;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Verdict end_to_end() {
    std::mt19937_64 rng(101);
    const auto start = Clock::now();
    int ok = 0;
    for (int i = 0; i < 100; ++i) {
        Cascade c = support::random_small_cascade(rng, 6, 1, 3);
        TailResult r = minimize_tail(c.head, c.tail);
        ok += verify_replacement(c.head, c.tail, r.machine);
    }
    const double secs = seconds_since(start);
    return {ok == 100 && secs < 120, fmt("%d/100 replacements verified in %.1f s (limit 120 s)", ok, secs)};
}

// Fewest states of any machine t' with t' behind h equivalent to t behind h,
// by trying every machine of each size.
std::size_t enumerated_minimum(const MealyMachine& h, const MealyMachine& t) {
    const MealyMachine target = compose_cascade(h, t);
    for (std::size_t k = 1;; ++k) {
        bool found = false;
        oracle::for_each_machine(k, t.inputs(), t.outputs(), [&](const MealyMachine& cand) {
            found = equivalent(compose_cascade(h, cand), target).equivalent;
            return !found;
        });
        if (found) return k;
    }
}

Verdict exact_minimality() {
    std::mt19937_64 rng(202);
    int match = 0;
    std::string first_miss;
    for (int i = 0; i < 30; ++i) {
        Alphabet x = support::letters(2, "x"), y = support::letters(2, "y"), z = support::letters(2, "z");
        MealyMachine h = random_mealy(1 + rng() % 3, x, y, rng());
        MealyMachine t = random_mealy(1 + rng() % 3, y, z, rng());
        std::size_t got = minimize_tail(h, t).machine.state_count();
        std::size_t brute = enumerated_minimum(h, t);
        if (got == brute) ++match;
        else if (first_miss.empty()) first_miss = fmt(" (instance %d: %zu vs %zu)", i, got, brute);
    }
    return {match == 30, fmt("%d/30 equal to the enumerated minimum", match) + first_miss};
}

Verdict cross_encoding() {
    std::mt19937_64 rng(303);
    int match = 0, reduced = 0;
    for (int i = 0; i < 50; ++i) {
        Cascade c = support::random_small_cascade(rng, 8, 2, 3);
        std::size_t p = minimize_tail(c.head, c.tail).machine.state_count();
        std::size_t n = minimize_tail_naive(c.head, c.tail).machine.state_count();
        match += p == n;
        reduced += p < c.tail.state_count();
    }
    return {match == 50, fmt("%d/50 equal minimal sizes (%d instances reducible)", match, reduced)};
}

Verdict exponential_family() {
    bool pass = true;
    std::string detail;
    for (std::size_t n = 1; n <= 3; ++n) {
        const auto start = Clock::now();
        MinimizeResult r = minimize_om(exp_family(n));
        const double secs = seconds_since(start);
        const bool ok = r.machine.state_count() >= (std::size_t{1} << n) && implements(r.machine, exp_family(n)).implements;
        const bool in_time = n < 3 || secs < 300;
        pass = pass && ok && in_time;
        detail += fmt("%sn=%zu: %zu states (need >= %zu, %.1f s)", n > 1 ? "; " : "", n, r.machine.state_count(),
                      std::size_t{1} << n, secs);
    }
    return {pass, detail};
}

Verdict reduction_biconditional() {
    std::mt19937_64 rng(505);
    int match = 0, nontrivial = 0;
    for (int i = 0; i < 20; ++i) {
        ObservationMachine n = random_om(1 + rng() % 4, 2, 2, 1, 50 + static_cast<unsigned>(rng() % 50), rng());
        Cascade c = np_reduction(n);
        auto impl = oracle::min_implementation(n, 4);
        auto repl = oracle::min_replacement(c.head, c.tail, 4);
        match += impl && repl && *impl == *repl;
        nontrivial += impl && *impl > 1;
    }
    return {match == 20, fmt("%d/20 equal brute-force sizes (%d need more than one state)", match, nontrivial)};
}

// Words up to this length are compared by the feasibility oracle.
constexpr std::size_t kWordBound = 12;

Verdict feasibility() {
    std::mt19937_64 rng(606);
    Alphabet x = support::letters(2, "x"), y = support::letters(2, "y"), z = support::letters(2, "z");
    int agree = 0, feasible_count = 0, certified = 0;
    std::vector<std::pair<MealyMachine, MealyMachine>> feasible_pairs;
    for (int i = 0; i < 50; ++i) {
        MealyMachine h = random_mealy(1 + rng() % 4, x, y, rng());
        MealyMachine m = i < 25 ? minimize_complete(compose_cascade(h, random_mealy(1 + rng() % 4, y, z, rng())))
                                : random_mealy(1 + rng() % 4, x, z, rng());
        FeasibilityVerdict v = feasible(h, m);
        bool oracle_feasible = oracle::brute_feasible(h, m, kWordBound);
        agree += v.feasible == oracle_feasible;
        if (v.feasible) {
            ++feasible_count;
            certified += equivalent(compose_cascade(h, some_solution(h, m)), m).equivalent;
            if (feasible_pairs.size() < 20) feasible_pairs.emplace_back(h, m);
        } else {
            const auto& [w1, w2] = *v.witness;
            certified += oracle::mealy_run(h, w1) == oracle::mealy_run(h, w2) &&
                         oracle::mealy_run(m, w1) != oracle::mealy_run(m, w2);
        }
    }
    // Every candidate tail with up to three states, on each feasible pair.
    int prop_agree = 0, prop_total = 0, solutions = 0;
    for (const auto& [h, m] : feasible_pairs) {
        ObservationMachine om = solution_om(h, m);
        for (std::size_t k = 1; k <= 3; ++k)
            oracle::for_each_machine(k, y, z, [&](const MealyMachine& t) {
                bool a = implements(t, om).implements;
                bool b = equivalent(compose_cascade(h, t), m).equivalent;
                ++prop_total;
                prop_agree += a == b;
                solutions += b;
                return true;
            });
    }
    const bool pass = agree == 50 && certified == 50 && feasible_pairs.size() == 20 && prop_agree == prop_total;
    return {pass, fmt("verdicts %d/50 match word pairs up to length %zu (%d feasible, %d/50 certified); "
                      "candidates %d/%d agree over %zu feasible pairs (%d solutions)",
                      agree, kWordBound, feasible_count, certified, prop_agree, prop_total, feasible_pairs.size(),
                      solutions)};
}

MealyMachine drop_extra_symbols(const MealyMachine& t, const ObservationMachine& n) {
    std::vector<StateId> next;
    std::vector<Symbol> out;
    for (StateId q = 0; q < t.state_count(); ++q)
        for (Symbol y = 0; y < n.inputs().size(); ++y) {
            next.push_back(t.next(q, y));
            Symbol o = t.output(q, y);
            out.push_back(o < n.outputs().size() ? o : 0);
        }
    return MealyMachine(n.inputs(), n.outputs(), t.state_names(), t.initial(), std::move(next), std::move(out));
}

Verdict split_instances() {
    std::mt19937_64 rng(707);
    int ok = 0;
    for (int i = 0; i < 20; ++i) {
        ObservationMachine n = oracle::random_consistent_om(rng, 4, 2, 2, 2);
        SplitInstance s = split_om(n);
        if (!feasible(s.head, s.model).feasible) continue;
        MinimizeResult r = minimal_solution(s.head, s.model);
        ok += equivalent(compose_cascade(s.head, r.machine), s.model).equivalent &&
              implements(drop_extra_symbols(r.machine, n), n).implements;
    }
    return {ok == 20, fmt("%d/20 feasible with a minimal solution implementing the machine", ok)};
}

Verdict performance_shape() {
    constexpr std::size_t n = 12, alpha = 4, runs = 5;
    constexpr double timeout = 600;
    std::size_t proposed_fast = 0, naive_timeouts = 0, naive_done = 0;
    double proposed_max = 0;
    std::string naive_times;
    for (Seed seed = 0; seed < runs; ++seed) {
        Cascade c = random_cascade(n, n, alpha, seed);
        BenchRecord p = run_proposed(c, seed, timeout);
        proposed_max = std::max(proposed_max, p.wall_ms / 1000.0);
        proposed_fast += p.status == "ok" && p.wall_ms < 60000;
    }
    for (Seed seed = 0; seed < runs; ++seed) {
        // Stop once the majority is settled either way.
        if (naive_timeouts * 2 > runs || naive_done * 2 > runs) break;
        Cascade c = random_cascade(n, n, alpha, seed);
        BenchRecord r = run_naive(c, seed, timeout);
        if (r.status == "timeout") ++naive_timeouts;
        else ++naive_done;
        naive_times += fmt("%s%.1f s%s", naive_times.empty() ? "" : ", ", r.wall_ms / 1000.0,
                           r.status == "timeout" ? " (timeout)" : "");
    }
    const bool pass = proposed_fast == runs && naive_timeouts * 2 > runs;
    return {pass, fmt("proposed %zu/%zu under 60 s (max %.2f s); naive timed out on %zu of %zu runs [%s]",
                      proposed_fast, runs, proposed_max, naive_timeouts, naive_timeouts + naive_done,
                      naive_times.c_str())};
}

Verdict bimodal_shape() {
    BimodalOptions options;
    options.count = 50;
    options.min_states = 12;
    options.max_states = 60;
    options.seed = 7;
    options.alpha = 4;
    options.timeout_seconds = 60;
    auto rows = bench_bimodal(options);
    std::size_t skipped = 0, timeouts = 0;
    for (const auto& r : rows) {
        skipped += r.skipped_encoding;
        timeouts += r.status == "timeout";
    }
    return {skipped * 4 >= rows.size(),
            fmt("%zu/%zu skipped the encoding (need >= 25%%), %zu timeouts", skipped, rows.size(), timeouts)};
}

struct Criterion {
    const char* name;
    Verdict (*run)();
};

const Criterion criteria[] = {
    {"end-to-end minimization", end_to_end},
    {"exact minimality against enumeration", exact_minimality},
    {"proposed and naive encodings agree", cross_encoding},
    {"exponential implementations", exponential_family},
    {"reduction preserves minimal size", reduction_biconditional},
    {"feasibility and solution machine", feasibility},
    {"split instances", split_instances},
    {"performance at n = 12", performance_shape},
    {"skipped encodings on random sizes", bimodal_shape},
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
            only = std::atoi(argv[++i]);
        } else {
            std::cerr << "usage: acceptance [--only N]\n";
            return 2;
        }
    }
    constexpr int count = static_cast<int>(std::size(criteria));
    if (only < 0 || only > count) {
        std::cerr << "criterion must be between 1 and " << count << '\n';
        return 2;
    }

    int failed = 0;
    for (int i = 1; i <= count; ++i) {
        if (only != 0 && i != only) continue;
        Verdict v;
        try {
            v = criteria[i - 1].run();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        std::cout << (v.pass ? "PASS" : "FAIL") << "  " << i << "  " << criteria[i - 1].name << ": " << v.detail
                  << std::endl;
        failed += !v.pass;
    }
    return failed == 0 ? 0 : 1;
}
