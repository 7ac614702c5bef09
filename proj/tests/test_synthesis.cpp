#include <doctest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "tailopt/error.hpp"
#include "tailopt/mealy_ops.hpp"
#include "tailopt/observation.hpp"
#include "tailopt/synthesis.hpp"

using namespace tailopt;

namespace {

// Head forgets its input, model does not.
std::pair<MealyMachine, MealyMachine> forgetful() {
    Alphabet x({"a", "b"});
    MealyMachine h(x, Alphabet({"u"}), {"h"}, 0, {0, 0}, {0, 0});
    MealyMachine m(x, Alphabet({"0", "1"}), {"m"}, 0, {0, 0}, {0, 1});
    return {h, m};
}

void check_witness(const MealyMachine& h, const MealyMachine& m, const FeasibilityVerdict& v) {
    REQUIRE(v.witness);
    const auto& [w1, w2] = *v.witness;
    REQUIRE(w1.size() == w2.size());
    REQUIRE_FALSE(w1.empty());
    CHECK(oracle::mealy_run(h, w1) == oracle::mealy_run(h, w2));
    CHECK(oracle::mealy_run(m, w1).back() != oracle::mealy_run(m, w2).back());
    // No shorter pair exists.
    CHECK(oracle::brute_feasible(h, m, w1.size() - 1));
}

}  // namespace

TEST_SUITE("synthesis") {

TEST_CASE("a head that forgets its input cannot feed an input-dependent model") {
    auto [h, m] = forgetful();
    FeasibilityVerdict v = feasible(h, m);
    CHECK_FALSE(v.feasible);
    check_witness(h, m, v);
    CHECK(v.witness->first.size() == 1);
    CHECK_THROWS_AS(solution_om(h, m), InvalidArgument);
    CHECK_THROWS_AS(some_solution(h, m), InvalidArgument);
    CHECK_THROWS_AS(minimal_solution(h, m), InvalidArgument);
    CHECK_THROWS_AS(feasible(h, random_mealy(1, 3, 2, 0)), AlphabetMismatch);
}

TEST_CASE("composed cascades are always feasible") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 25; ++i) {
        Cascade c = support::random_small_cascade(rng, 4, 2, 3);
        MealyMachine m = compose_cascade(c.head, c.tail);
        CHECK(feasible(c.head, m).feasible);
        MealyMachine t = some_solution(c.head, m);
        CHECK(equivalent(compose_cascade(c.head, t), m).equivalent);
    }
}

TEST_CASE("solutions of a composed cascade are the tail's replacements") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 40; ++i) {
        Cascade c = support::random_small_cascade(rng, 3, 1 + i % 2, 2);
        MealyMachine m = compose_cascade(c.head, c.tail);
        MinimizeResult r = minimal_solution(c.head, m);
        CHECK(equivalent(compose_cascade(c.head, r.machine), m).equivalent);
        CHECK(r.machine.state_count() == oracle::min_replacement(c.head, c.tail, 6).value());
        CHECK(r.machine.state_count() == minimize_tail(c.head, c.tail).machine.state_count());
    }
}

TEST_CASE("feasibility of random pairs against bounded word enumeration") {
    std::mt19937_64 rng(3);
    int infeasible = 0, feasible_count = 0;
    for (int i = 0; i < 60; ++i) {
        Alphabet x = support::letters(2, "x");
        MealyMachine h = random_mealy(1 + rng() % 4, x, support::letters(1 + rng() % 2, "y"), rng());
        MealyMachine m = random_mealy(1 + rng() % 4, x, support::letters(2, "z"), rng());
        FeasibilityVerdict v = feasible(h, m);
        if (v.feasible) {
            ++feasible_count;
            // A solution certifies the verdict; words up to length 10 must agree.
            CHECK(oracle::brute_feasible(h, m, 10));
            CHECK(equivalent(compose_cascade(h, some_solution(h, m)), m).equivalent);
        } else {
            ++infeasible;
            check_witness(h, m, v);
        }
    }
    CHECK(infeasible > 10);
    CHECK(feasible_count > 5);
}

TEST_CASE("solution machine states are named after pairs") {
    std::mt19937_64 rng(4);
    Cascade c = support::random_small_cascade(rng, 3, 2, 2);
    MealyMachine m0 = compose_cascade(c.head, c.tail);
    ObservationMachine om = solution_om(c.head, m0);
    CHECK(om.state_names()[0] == c.head.state_names()[c.head.initial()] + "." + m0.state_names()[m0.initial()]);
    CHECK(om.inputs() == c.head.outputs());
    CHECK(is_consistent(om).consistent);

    Alphabet x({"x"});
    MealyMachine h(x, Alphabet({"y"}), {"a", "a.b"}, 0, {1, 0}, {0, 0});
    MealyMachine m(x, Alphabet({"z"}), {"b.c", "c"}, 0, {1, 0}, {0, 0});
    ObservationMachine clash = solution_om(h, m);
    CHECK(clash.state_names() == std::vector<std::string>{"q0", "q1"});
}

TEST_CASE("solutions of the split instance implement the split machine") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 30; ++i) {
        ObservationMachine n = oracle::random_consistent_om(rng, 4, 2, 2, 2);
        SplitInstance s = split_om(n);
        REQUIRE(feasible(s.head, s.model).feasible);
        MealyMachine any = some_solution(s.head, s.model);
        MinimizeResult best = minimal_solution(s.head, s.model);
        for (const MealyMachine* t : {&any, &best.machine}) {
            CHECK(equivalent(compose_cascade(s.head, *t), s.model).equivalent);
            // Drop the extra bottom symbols before comparing with n.
            std::vector<StateId> next;
            std::vector<Symbol> out;
            const std::size_t ny = n.inputs().size();
            for (StateId q = 0; q < t->state_count(); ++q)
                for (Symbol y = 0; y < ny; ++y) {
                    next.push_back(t->next(q, y));
                    Symbol z = t->output(q, y);
                    out.push_back(z < n.outputs().size() ? z : 0);
                }
            MealyMachine restricted(n.inputs(), n.outputs(), t->state_names(), t->initial(), next, out);
            CHECK(implements(restricted, n).implements);
        }
        CHECK(best.machine.state_count() == oracle::min_implementation(n, 6).value());
    }
}

TEST_CASE("the split exp_family(2) instance needs four states") {
    SplitInstance s = split_om(exp_family(2));
    MinimizeResult r = minimal_solution(s.head, s.model);
    CHECK(r.machine.state_count() >= 4);
    CHECK(equivalent(compose_cascade(s.head, r.machine), s.model).equivalent);
}

TEST_CASE("the determinisation cap applies to some_solution") {
    SplitInstance s = split_om(exp_family(3));
    CHECK_THROWS_AS(some_solution(s.head, s.model, 3), TooLarge);
}

}  // TEST_SUITE
