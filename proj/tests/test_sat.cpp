#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tailopt/error.hpp"
#include "tailopt/sat.hpp"

using namespace tailopt;

namespace {

Cnf random_3cnf(std::mt19937_64& rng, int vars, int clauses) {
    Cnf f;
    f.new_vars(vars);
    for (int i = 0; i < clauses; ++i) {
        int c[3];
        for (int& l : c) l = static_cast<int>(1 + rng() % vars) * (rng() % 2 ? 1 : -1);
        f.add_clause({c[0], c[1], c[2]});
    }
    return f;
}

// Pigeonhole: p pigeons, p-1 holes. Unsatisfiable and hard for resolution.
Cnf pigeonhole(int p) {
    Cnf f;
    const int h = p - 1;
    f.new_vars(p * h);
    auto v = [h](int i, int j) { return 1 + i * h + j; };
    for (int i = 0; i < p; ++i) {
        std::vector<int> c;
        for (int j = 0; j < h; ++j) c.push_back(v(i, j));
        f.add_clause(c);
    }
    for (int j = 0; j < h; ++j)
        for (int a = 0; a < p; ++a)
            for (int b = a + 1; b < p; ++b) f.add_clause({-v(a, j), -v(b, j)});
    return f;
}

std::filesystem::path write_script(const std::string& name, const std::string& body) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << body;
    std::filesystem::permissions(path, std::filesystem::perms::owner_all);
    return path;
}

std::optional<std::filesystem::path> pysat_solver() {
    std::filesystem::path script = TAILOPT_TEST_TOOLS "/pysat_solver.py";
    if (std::system("python3 -c 'import pysat' >/dev/null 2>&1") != 0) return std::nullopt;
    return script;
}

}  // namespace

TEST_SUITE("sat-backend") {

TEST_CASE("unit clause is satisfied") {
    Cnf f;
    f.new_var();
    f.add_clause({1});
    SatOutcome r = solve(f, 10.0);
    CHECK(r.status == SatStatus::sat);
    CHECK(r.value(1));
}

TEST_CASE("contradiction is unsatisfiable") {
    Cnf f;
    f.new_var();
    f.add_clause({1});
    f.add_clause({-1});
    CHECK(solve(f, 10.0).status == SatStatus::unsat);
    CHECK(solve(f, 10.0).model.empty());
}

TEST_CASE("construction rejects empty clauses and unknown variables") {
    Cnf f;
    f.new_vars(2);
    CHECK_THROWS_AS(f.add_clause(std::vector<int>{}), InvalidArgument);
    CHECK_THROWS_AS(f.add_clause({3}), InvalidArgument);
    CHECK_THROWS_AS(f.add_clause({0}), InvalidArgument);
    f.mark_unsat();
    CHECK(solve(f, 10.0).status == SatStatus::unsat);
    CHECK(to_dimacs(f) == "p cnf 2 1\n0\n");
}

TEST_CASE("empty formula is satisfiable") {
    Cnf f;
    CHECK(solve(f, 10.0).status == SatStatus::sat);
    f.new_vars(3);
    SatOutcome r = solve(f, 10.0);
    CHECK(r.status == SatStatus::sat);
    CHECK(r.model.size() == 4);
}

TEST_CASE("DIMACS text for a single clause") {
    Cnf f;
    f.new_vars(2);
    f.add_clause({1, -2});
    CHECK(to_dimacs(f) == "p cnf 2 1\n1 -2 0\n");
}

TEST_CASE("DIMACS round-trip through an independent reader") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        Cnf f = random_3cnf(rng, 1 + static_cast<int>(rng() % 30), static_cast<int>(rng() % 60) + 1);
        oracle::Dimacs d = oracle::read_dimacs(to_dimacs(f));
        CHECK(d.vars == f.var_count());
        CHECK(d.declared_clauses == f.clause_count());
        REQUIRE(d.clauses.size() == f.clause_count());
        for (std::size_t c = 0; c < f.clause_count(); ++c) {
            auto span = f.clause(c);
            CHECK(d.clauses[c] == std::vector<int>(span.begin(), span.end()));
        }
    }
}

TEST_CASE("solver output parsing") {
    CHECK(parse_solver_output("s UNSATISFIABLE\n", 3).status == SatStatus::unsat);
    SatOutcome r = parse_solver_output("c banner\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3);
    CHECK(r.status == SatStatus::sat);
    CHECK(r.model == std::vector<bool>{false, true, false, true});
    CHECK(parse_solver_output("s UNKNOWN\n", 1).status == SatStatus::timeout);
    CHECK_THROWS_AS(parse_solver_output("v 1 0\n", 1), SolverError);
    CHECK_THROWS_AS(parse_solver_output("s MAYBE\n", 1), SolverError);
    CHECK_THROWS_AS(parse_solver_output("s SATISFIABLE\nv 1 x 0\n", 1), SolverError);
    CHECK_THROWS_AS(parse_solver_output("s SATISFIABLE\nv 5 0\n", 1), SolverError);
    CHECK_THROWS_AS(parse_solver_output("s SATISFIABLE\n", 2), SolverError);
}

TEST_CASE("built-in solver agrees with exhaustive search") {
    std::mt19937_64 rng(2);
    int sat = 0, unsat = 0;
    for (int i = 0; i < 300; ++i) {
        int vars = 3 + static_cast<int>(rng() % 14);
        int clauses = static_cast<int>(vars * (3.0 + (rng() % 300) / 100.0));
        Cnf f = random_3cnf(rng, vars, clauses);
        SatOutcome r = solve(f, 30.0);
        bool expected = oracle::brute_sat(f);
        CHECK((r.status == SatStatus::sat) == expected);
        CHECK(r.status != SatStatus::timeout);
        if (r.status == SatStatus::sat) {
            ++sat;
            CHECK_FALSE(first_violated(f, r.model));
        } else {
            ++unsat;
        }
    }
    CHECK(sat > 30);
    CHECK(unsat > 30);
}

TEST_CASE("pigeonhole instances are refuted") {
    for (int p = 2; p <= 7; ++p) CHECK(solve(pigeonhole(p), 60.0).status == SatStatus::unsat);
}

TEST_CASE("larger satisfiable instances near the threshold") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        // Planted solution keeps them satisfiable.
        const int vars = 150;
        std::vector<bool> plant(vars + 1);
        for (int v = 1; v <= vars; ++v) plant[v] = rng() % 2;
        Cnf f;
        f.new_vars(vars);
        for (int c = 0; c < 600; ++c) {
            int l[3];
            do {
                for (int& x : l) x = static_cast<int>(1 + rng() % vars) * (rng() % 2 ? 1 : -1);
            } while (std::none_of(l, l + 3, [&](int x) { return plant[std::abs(x)] == (x > 0); }));
            f.add_clause({l[0], l[1], l[2]});
        }
        CHECK(solve(f, 60.0).status == SatStatus::sat);
    }
}

TEST_CASE("an expired deadline reports a timeout") {
    Cnf f = pigeonhole(11);
    SatOutcome r = solve(f, Deadline::after(0.05));
    CHECK(r.status == SatStatus::timeout);
    CHECK(r.model.empty());
}

TEST_CASE("annotations") {
    Cnf f;
    int v = f.new_var();
    f.annotate(v, "L(s0,0)");
    CHECK(f.annotation(v) == "L(s0,0)");
    CHECK(f.annotation(5).empty());
    CHECK_THROWS_AS(f.annotate(7, "x"), InvalidArgument);
}

TEST_CASE("missing external solver is an error, not a timeout") {
    Cnf f;
    f.new_var();
    f.add_clause({1});
    SolverOptions options{std::filesystem::path("/nonexistent/solver")};
    CHECK_THROWS_AS(solve(f, 10.0, options), SolverError);
}

TEST_CASE("malformed or lying external output is rejected") {
    Cnf f;
    f.new_vars(2);
    f.add_clause({1});
    f.add_clause({2});
    auto garbage = write_script("tailopt_garbage_solver.sh", "#!/bin/sh\necho 'hello'\n");
    CHECK_THROWS_AS(solve(f, 10.0, SolverOptions{garbage}), SolverError);
    auto liar = write_script("tailopt_lying_solver.sh", "#!/bin/sh\necho 's SATISFIABLE'\necho 'v -1 -2 0'\n");
    CHECK_THROWS_AS(solve(f, 10.0, SolverOptions{liar}), SolverError);
    auto slow = write_script("tailopt_slow_solver.sh", "#!/bin/sh\nsleep 30\n");
    CHECK(solve(f, 0.2, SolverOptions{slow}).status == SatStatus::timeout);
}

TEST_CASE("external solver agrees with the built-in solver") {
    auto solver = pysat_solver();
    if (!solver) {
        MESSAGE("pysat is not installed; skipping cross-backend check");
        return;
    }
    std::mt19937_64 rng(4);
    int agreements = 0;
    for (int i = 0; i < 100; ++i) {
        Cnf f = random_3cnf(rng, 20, 70 + static_cast<int>(rng() % 40));
        SatOutcome a = solve(f, 60.0);
        SatOutcome b = solve(f, 60.0, SolverOptions{*solver});
        CHECK(a.status == b.status);
        agreements += a.status == b.status;
    }
    CHECK(agreements == 100);
}

TEST_CASE("solver path from the environment") {
    ::setenv("TAILOPT_SOLVER", "/opt/some/solver", 1);
    CHECK(solver_from_environment() == std::filesystem::path("/opt/some/solver"));
    ::unsetenv("TAILOPT_SOLVER");
    CHECK_FALSE(solver_from_environment());
}

}  // TEST_SUITE
