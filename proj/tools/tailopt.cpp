#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

#include "tailopt/bench.hpp"
#include "tailopt/error.hpp"
#include "tailopt/generators.hpp"
#include "tailopt/machine_io.hpp"
#include "tailopt/minimization.hpp"
#include "tailopt/observation.hpp"
#include "tailopt/synthesis.hpp"

using namespace tailopt;

namespace {

constexpr int exit_error = 1;
constexpr int exit_infeasible = 2;
constexpr int exit_timeout = 3;

SolverOptions solver_options(const std::string& flag) {
    SolverOptions s;
    if (!flag.empty()) s.external = flag;
    else s.external = solver_from_environment();
    return s;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") std::cout << text;
    else write_text_file(path, text);
}

// CLI11 wants long options to start with "--"; the documented spelling of the
// two-output generator flags is "-o-head" and friends.
std::vector<std::string> normalise_args(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = argc - 1; i >= 1; --i) {
        std::string a = argv[i];
        if (a.rfind("-o-", 0) == 0) a = "-" + a;
        args.push_back(std::move(a));
    }
    return args;  // CLI11 expects reverse order
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimise and synthesise the tail of a cascade of Mealy machines", "tailopt"};
    app.require_subcommand(1);

    std::string head_path, tail_path, model_path, om_path, out_path, solver_flag, emit_dir;
    std::string method = "proposed";
    double timeout = 0;

    auto* minimize = app.add_subcommand("minimize", "Smallest tail equivalent behind the head");
    minimize->add_option("--head", head_path, "Head machine")->required()->check(CLI::ExistingFile);
    minimize->add_option("--tail", tail_path, "Tail machine")->required()->check(CLI::ExistingFile);
    minimize->add_option("-o", out_path, "Output file (stdout if omitted)");
    minimize->add_option("--method", method, "proposed or naive")->check(CLI::IsMember({"proposed", "naive"}));
    minimize->add_option("--timeout", timeout, "Seconds; 0 means no limit")->check(CLI::NonNegativeNumber);
    minimize->add_option("--solver", solver_flag, "External SAT solver executable");
    minimize->add_option("--emit-cnf", emit_dir, "Write each attempted formula as cover_n<k>.cnf");

    auto* feas = app.add_subcommand("feasible", "Does some tail make the cascade equivalent to the model?");
    feas->add_option("--head", head_path, "Head machine")->required()->check(CLI::ExistingFile);
    feas->add_option("--model", model_path, "Model machine")->required()->check(CLI::ExistingFile);

    bool minimal = false;
    std::size_t cap = std::size_t{1} << 20;
    auto* synth = app.add_subcommand("synthesize", "Build a tail that solves the equation");
    synth->add_option("--head", head_path, "Head machine")->required()->check(CLI::ExistingFile);
    synth->add_option("--model", model_path, "Model machine")->required()->check(CLI::ExistingFile);
    synth->add_option("-o", out_path, "Output file (stdout if omitted)");
    synth->add_flag("--minimal", minimal, "Fewest states (SAT search)");
    synth->add_option("--cap", cap, "State limit for the determinised solution");
    synth->add_option("--timeout", timeout, "Seconds; 0 means no limit")->check(CLI::NonNegativeNumber);
    synth->add_option("--solver", solver_flag, "External SAT solver executable");

    auto* gen = app.add_subcommand("generate", "Instance generators");
    gen->require_subcommand(1);
    std::size_t states = 0, in_size = 0, out_size = 0, n = 0;
    Seed seed = 0;
    std::string o_head, o_tail, o_model;
    auto* g_random = gen->add_subcommand("random", "Random complete Mealy machine");
    g_random->add_option("--states", states)->required()->check(CLI::PositiveNumber);
    g_random->add_option("--in", in_size)->required()->check(CLI::PositiveNumber);
    g_random->add_option("--out", out_size)->required()->check(CLI::PositiveNumber);
    g_random->add_option("--seed", seed)->required();
    g_random->add_option("-o", out_path);
    auto* g_exp = gen->add_subcommand("exp-family", "Observation machine with exponentially large implementations");
    g_exp->add_option("--n", n)->required()->check(CLI::PositiveNumber);
    g_exp->add_option("-o", out_path);
    auto* g_np = gen->add_subcommand("np-reduction", "Cascade whose tail minimisation solves an IS-machine minimisation");
    g_np->add_option("--om", om_path)->required()->check(CLI::ExistingFile);
    g_np->add_option("--o-head", o_head)->required();
    g_np->add_option("--o-tail", o_tail)->required();
    auto* g_split = gen->add_subcommand("split", "Head and model whose solutions implement the machine");
    g_split->add_option("--om", om_path)->required()->check(CLI::ExistingFile);
    g_split->add_option("--o-head", o_head)->required();
    g_split->add_option("--o-model", o_model)->required();

    auto* bench = app.add_subcommand("bench", "Benchmarks (CSV output)");
    bench->require_subcommand(1);
    std::string sizes = "4,8,12,16", seeds = "0..9";
    std::size_t alpha = 4;
    auto* b_cmp = bench->add_subcommand("compare", "Proposed against naive encoding");
    b_cmp->add_option("--sizes", sizes);
    b_cmp->add_option("--seeds", seeds);
    b_cmp->add_option("--alpha", alpha)->check(CLI::PositiveNumber);
    b_cmp->add_option("--timeout", timeout)->check(CLI::PositiveNumber);
    b_cmp->add_option("--solver", solver_flag);
    b_cmp->add_option("-o", out_path);
    BimodalOptions bi;
    auto* b_bi = bench->add_subcommand("bimodal", "Proposed method on random sizes");
    b_bi->add_option("--count", bi.count)->check(CLI::PositiveNumber);
    b_bi->add_option("--min", bi.min_states)->check(CLI::PositiveNumber);
    b_bi->add_option("--max", bi.max_states)->check(CLI::PositiveNumber);
    b_bi->add_option("--seed", bi.seed);
    b_bi->add_option("--alpha", bi.alpha)->check(CLI::PositiveNumber);
    b_bi->add_option("--timeout", bi.timeout_seconds)->check(CLI::PositiveNumber);
    b_bi->add_option("--solver", solver_flag);
    b_bi->add_option("-o", out_path);

    try {
        app.parse(normalise_args(argc, argv));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const Deadline deadline = timeout > 0 ? Deadline::after(timeout) : Deadline::never();

        if (*minimize) {
            MealyMachine h = parse_mealy(read_text_file(head_path));
            MealyMachine t = parse_mealy(read_text_file(tail_path));
            auto dump = [&](std::size_t k, const Cnf& f) {
                if (emit_dir.empty()) return;
                std::filesystem::create_directories(emit_dir);
                write_text_file(std::filesystem::path(emit_dir) / ("cover_n" + std::to_string(k) + ".cnf"), to_dimacs(f));
            };
            if (method == "naive") {
                NaiveOptions opts;
                opts.deadline = deadline;
                opts.solver = solver_options(solver_flag);
                opts.on_encoding = dump;
                NaiveResult r = minimize_tail_naive(h, t, opts);
                emit(out_path, serialize_machine(r.machine));
                std::cerr << "states " << t.state_count() << " -> " << r.machine.state_count() << ", sat calls "
                          << r.sat_calls << '\n';
            } else {
                MinimizeOptions opts;
                opts.deadline = deadline;
                opts.solver = solver_options(solver_flag);
                opts.on_encoding = dump;
                TailResult r = minimize_tail(h, t, opts);
                emit(out_path, serialize_machine(r.machine));
                std::cerr << "states " << t.state_count() << " -> " << r.machine.state_count() << ", clique "
                          << r.stats.clique_size << ", sat calls " << r.stats.sat_calls
                          << (r.skipped_encoding ? ", encoding skipped" : "") << '\n';
            }
        } else if (*feas) {
            MealyMachine h = parse_mealy(read_text_file(head_path));
            MealyMachine m = parse_mealy(read_text_file(model_path));
            FeasibilityVerdict v = feasible(h, m);
            if (v.feasible) {
                std::cout << "feasible\n";
                return 0;
            }
            std::cout << "infeasible\n"
                      << "word1: " << format_word(h.inputs(), v.witness->first) << '\n'
                      << "word2: " << format_word(h.inputs(), v.witness->second) << '\n';
            return exit_infeasible;
        } else if (*synth) {
            MealyMachine h = parse_mealy(read_text_file(head_path));
            MealyMachine m = parse_mealy(read_text_file(model_path));
            if (FeasibilityVerdict v = feasible(h, m); !v.feasible) {
                std::cerr << "infeasible: '" << format_word(h.inputs(), v.witness->first) << "' and '"
                          << format_word(h.inputs(), v.witness->second) << "'\n";
                return exit_infeasible;
            }
            if (minimal) {
                MinimizeOptions opts;
                opts.deadline = deadline;
                opts.solver = solver_options(solver_flag);
                emit(out_path, serialize_machine(minimal_solution(h, m, opts, cap).machine));
            } else {
                emit(out_path, serialize_machine(some_solution(h, m, cap)));
            }
        } else if (*g_random) {
            emit(out_path, serialize_machine(random_mealy(states, in_size, out_size, seed)));
        } else if (*g_exp) {
            emit(out_path, serialize_machine(exp_family(n)));
        } else if (*g_np) {
            Cascade c = np_reduction(parse_om(read_text_file(om_path)));
            write_text_file(o_head, serialize_machine(c.head));
            write_text_file(o_tail, serialize_machine(c.tail));
        } else if (*g_split) {
            SplitInstance s = split_om(parse_om(read_text_file(om_path)));
            write_text_file(o_head, serialize_machine(s.head));
            write_text_file(o_model, serialize_machine(s.model));
        } else if (*b_cmp) {
            CompareOptions opts;
            for (auto v : parse_number_list(sizes)) opts.sizes.push_back(static_cast<std::size_t>(v));
            opts.seeds = parse_number_list(seeds);
            opts.alpha = alpha;
            opts.timeout_seconds = timeout > 0 ? timeout : 600;
            opts.solver = solver_options(solver_flag);
            opts.on_record = [](const BenchRecord& r) {
                std::cerr << r.method << " n=" << r.n_states << " seed=" << r.seed << " " << r.status << " "
                          << r.wall_ms << "ms\n";
            };
            emit(out_path, format_csv(bench_compare(opts)));
        } else if (*b_bi) {
            bi.solver = solver_options(solver_flag);
            bi.on_record = [](const BenchRecord& r) {
                std::cerr << "n=" << r.n_states << " " << r.status << " " << r.wall_ms << "ms"
                          << (r.skipped_encoding ? " skipped" : "") << '\n';
            };
            emit(out_path, format_csv(bench_bimodal(bi)));
        }
    } catch (const Timeout& e) {
        std::cerr << "timeout: " << e.what() << '\n';
        return exit_timeout;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_error;
    }
    return 0;
}
