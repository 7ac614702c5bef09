#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"
#include "support.hpp"
#include "tailopt/bench.hpp"
#include "tailopt/error.hpp"
#include "tailopt/machine_io.hpp"
#include "tailopt/mealy_ops.hpp"
#include "tailopt/minimization.hpp"

using namespace tailopt;
namespace fs = std::filesystem;

namespace {

BenchRecord record(std::string method, std::size_t n, Seed seed, std::optional<std::size_t> result, bool skipped,
                   std::string status) {
    BenchRecord r;
    r.method = std::move(method);
    r.n_states = n;
    r.seed = seed;
    r.wall_ms = 17 * n;
    r.result_states = result;
    r.sat_calls = n / 2;
    r.skipped_encoding = skipped;
    r.status = std::move(status);
    return r;
}

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("tailopt_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(dir / name) << text;
        return dir / name;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int cli(const std::string& args, const fs::path& out = {}) {
    std::string cmd = std::string(TAILOPT_CLI) + " " + args;
    if (!out.empty()) cmd += " > " + out.string();
    cmd += " 2>/dev/null";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_SUITE("cli-bench") {

TEST_CASE("CSV round trip") {
    std::vector<BenchRecord> rows{record("proposed", 12, 0, 12, true, "ok"), record("naive", 12, 0, std::nullopt, false, "timeout"),
                                  record("proposed", 40, 123456789012345ull, 37, false, "ok")};
    std::string text = format_csv(rows);
    CHECK(text.substr(0, text.find('\n')) == csv_header);
    CHECK(text.find("naive,12,0,204,,6,false,timeout\n") != std::string::npos);
    CHECK(parse_csv(text) == rows);
    CHECK(parse_csv(std::string(csv_header) + "\r\n").empty());
}

TEST_CASE("malformed CSV is rejected with a line number") {
    std::string h = std::string(csv_header) + "\n";
    CHECK_THROWS_AS(parse_csv(""), ParseError);
    CHECK_THROWS_AS(parse_csv("method,n\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(h + "proposed,1,2,3,4,5,false\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(h + "other,1,2,3,4,5,false,ok\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(h + "proposed,x,2,3,4,5,false,ok\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(h + "proposed,1,2,3,4,5,yes,ok\n"), ParseError);
    CHECK_THROWS_AS(parse_csv(h + "proposed,1,2,3,4,5,false,done\n"), ParseError);
    try {
        parse_csv(h + "naive,1,2,3,4,5,false,ok\nnaive,1,2,-3,4,5,false,ok\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
}

TEST_CASE("number lists") {
    CHECK(parse_number_list("5") == std::vector<std::uint64_t>{5});
    CHECK(parse_number_list("0..3,7") == std::vector<std::uint64_t>{0, 1, 2, 3, 7});
    CHECK(parse_number_list("2,2..2") == std::vector<std::uint64_t>{2, 2});
    CHECK_THROWS_AS(parse_number_list(""), InvalidArgument);
    CHECK_THROWS_AS(parse_number_list("3..1"), InvalidArgument);
    CHECK_THROWS_AS(parse_number_list("a"), InvalidArgument);
    CHECK_THROWS_AS(parse_number_list("1,,2"), InvalidArgument);
}

TEST_CASE("single-state cascades") {
    CompareOptions options;
    options.sizes = {1};
    options.seeds = {0, 1, 2};
    options.alpha = 2;
    std::size_t seen = 0;
    options.on_record = [&](const BenchRecord&) { ++seen; };
    auto rows = bench_compare(options);
    REQUIRE(rows.size() == 6);
    CHECK(seen == 6);
    for (const auto& r : rows) {
        CHECK(r.status == "ok");
        CHECK(r.result_states == 1u);
    }
    CHECK(rows[0].method == "proposed");
    CHECK(rows[1].method == "naive");
    CHECK(rows[0].skipped_encoding);
}

TEST_CASE("comparison rows are ordered and agree") {
    CompareOptions options;
    options.sizes = {3, 5};
    options.seeds = {0, 1, 2, 3};
    options.alpha = 2;
    auto rows = bench_compare(options);
    REQUIRE(rows.size() == 16);
    for (std::size_t i = 0; i < rows.size(); i += 2) {
        const auto &p = rows[i], &n = rows[i + 1];
        CHECK(p.method == "proposed");
        CHECK(n.method == "naive");
        CHECK(p.n_states == n.n_states);
        CHECK(p.seed == n.seed);
        CHECK(p.result_states == n.result_states);
        CHECK(p.n_states == options.sizes[i / 8]);
        CHECK(p.seed == options.seeds[(i / 2) % 4]);
        Cascade c = random_cascade(p.n_states, p.n_states, 2, p.seed);
        if (p.n_states <= 3) CHECK(p.result_states == oracle::min_replacement(c.head, c.tail, 5));
        if (p.skipped_encoding) {
            CHECK(p.result_states == p.n_states);
            CHECK(p.sat_calls == 0);
        }
    }
    CHECK_THROWS_AS(bench_compare(CompareOptions{}), InvalidArgument);
}

TEST_CASE("bimodal runs draw sizes in range and repeat from the seed") {
    BimodalOptions options;
    options.count = 8;
    options.min_states = 3;
    options.max_states = 6;
    options.alpha = 2;
    auto a = bench_bimodal(options), b = bench_bimodal(options);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].n_states >= 3);
        CHECK(a[i].n_states <= 6);
        CHECK(a[i].n_states == b[i].n_states);
        CHECK(a[i].seed == b[i].seed);
        CHECK(a[i].result_states == b[i].result_states);
        CHECK(a[i].status == "ok");
        if (a[i].skipped_encoding) CHECK(a[i].result_states == a[i].n_states);
    }
    options.min_states = options.max_states = 1;
    options.count = 2;
    for (const auto& r : bench_bimodal(options)) CHECK(r.n_states == 1);
    options.min_states = 7;
    CHECK_THROWS_AS(bench_bimodal(options), InvalidArgument);
}

TEST_CASE("timeouts are reported at the budget") {
    Cascade c = random_cascade(12, 12, 4, 0);
    BenchRecord r = run_naive(c, 0, 0.05);
    CHECK(r.status == "timeout");
    CHECK(r.wall_ms == 50);
    CHECK_FALSE(r.result_states);
}

TEST_CASE("command line round trip") {
    Scratch s;
    auto d = s.dir.string();
    REQUIRE(cli("generate random --states 4 --in 2 --out 2 --seed 3 -o " + d + "/h.txt") == 0);
    REQUIRE(cli("generate random --states 5 --in 2 --out 2 --seed 4", s.dir / "t0.txt") == 0);
    // The tail reads the head's outputs: rename x* to y* and y* to z*.
    std::string tail = slurp(s.dir / "t0.txt");
    MealyMachine t0 = parse_mealy(tail);
    MealyMachine t(Alphabet({"y0", "y1"}), Alphabet({"z0", "z1"}), t0.state_names(), t0.initial(), t0.next_table(),
                   t0.output_table());
    s.write("t.txt", serialize_machine(t));
    MealyMachine h = parse_mealy(slurp(s.dir / "h.txt"));
    CHECK(h == random_mealy(4, 2, 2, 3));

    for (std::string method : {"proposed", "naive"}) {
        REQUIRE(cli("minimize --head " + d + "/h.txt --tail " + d + "/t.txt --method " + method + " -o " + d +
                    "/r.txt --emit-cnf " + d + "/cnf") == 0);
        MealyMachine r = parse_mealy(slurp(s.dir / "r.txt"));
        CHECK(verify_replacement(h, t, r));
        CHECK(r.state_count() == minimize_tail(h, t).machine.state_count());
    }
    CHECK(fs::exists(s.dir / "cnf" / "cover_n1.cnf"));
    CHECK(oracle::read_dimacs(slurp(s.dir / "cnf" / "cover_n1.cnf")).vars > 0);

    s.write("m.txt", serialize_machine(compose_cascade(h, t)));
    CHECK(cli("feasible --head " + d + "/h.txt --model " + d + "/m.txt", s.dir / "f.txt") == 0);
    CHECK(slurp(s.dir / "f.txt") == "feasible\n");
    REQUIRE(cli("synthesize --minimal --head " + d + "/h.txt --model " + d + "/m.txt -o " + d + "/syn.txt") == 0);
    CHECK(tailopt::equivalent(compose_cascade(h, parse_mealy(slurp(s.dir / "syn.txt"))), compose_cascade(h, t)).equivalent);

    s.write("const.txt", "type mealy\ninputs x0 x1\noutputs y0 y1\nstates c\ninitial c\ntrans c x0 c y0\ntrans c x1 c y0\n");
    s.write("id.txt", "type mealy\ninputs x0 x1\noutputs z0 z1\nstates c\ninitial c\ntrans c x0 c z0\ntrans c x1 c z1\n");
    CHECK(cli("feasible --head " + d + "/const.txt --model " + d + "/id.txt", s.dir / "f.txt") == 2);
    CHECK(slurp(s.dir / "f.txt").rfind("infeasible\nword1: ", 0) == 0);
    CHECK(cli("synthesize --head " + d + "/const.txt --model " + d + "/id.txt") == 2);

    Cascade big = random_cascade(12, 12, 4, 0);
    s.write("bh.txt", serialize_machine(big.head));
    s.write("bt.txt", serialize_machine(big.tail));
    CHECK(cli("minimize --method naive --timeout 0.05 --head " + d + "/bh.txt --tail " + d + "/bt.txt") == 3);

    CHECK(cli("feasible --head " + d + "/missing.txt --model " + d + "/id.txt") != 0);
    s.write("bad.txt", "type mealy\ninputs a\n");
    CHECK(cli("feasible --head " + d + "/bad.txt --model " + d + "/id.txt") == 1);
}

TEST_CASE("command line generators and benchmarks") {
    Scratch s;
    auto d = s.dir.string();
    REQUIRE(cli("generate exp-family --n 2 -o " + d + "/e.txt") == 0);
    CHECK(parse_om(slurp(s.dir / "e.txt")) == exp_family(2));
    s.write("n.txt", "type om\ninputs a b\noutputs 0 1\nstates p q\ninitial p\ntrans p a { q } 1\ntrans q b { p } 0\n");
    REQUIRE(cli("generate np-reduction --om " + d + "/n.txt --o-head " + d + "/nh.txt --o-tail " + d + "/nt.txt") == 0);
    Cascade np = np_reduction(parse_om(slurp(s.dir / "n.txt")));
    CHECK(parse_mealy(slurp(s.dir / "nh.txt")) == np.head);
    CHECK(parse_mealy(slurp(s.dir / "nt.txt")) == np.tail);
    REQUIRE(cli("generate split --om " + d + "/e.txt --o-head " + d + "/sh.txt --o-model " + d + "/sm.txt") == 0);
    CHECK(parse_mealy(slurp(s.dir / "sm.txt")) == split_om(exp_family(2)).model);

    REQUIRE(cli("bench compare --sizes 1..2 --seeds 0,5 --alpha 2 -o " + d + "/cmp.csv") == 0);
    auto rows = parse_csv(slurp(s.dir / "cmp.csv"));
    CHECK(rows.size() == 8);
    REQUIRE(cli("bench bimodal --count 3 --min 2 --max 4 --alpha 2", s.dir / "bi.csv") == 0);
    CHECK(parse_csv(slurp(s.dir / "bi.csv")).size() == 3);
}

}  // TEST_SUITE
