#include "tailopt/bench.hpp"

#include <charconv>
#include <chrono>
#include <sstream>

#include "tailopt/error.hpp"
#include "tailopt/minimization.hpp"

namespace tailopt {

namespace {

using Clock = std::chrono::steady_clock;

std::uint64_t elapsed_ms(Clock::time_point since) {
    return static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - since).count());
}

BenchRecord timed_out(BenchRecord r, double timeout_seconds, std::size_t sat_calls) {
    r.status = "timeout";
    r.wall_ms = static_cast<std::uint64_t>(timeout_seconds * 1000.0);
    r.result_states.reset();
    r.sat_calls = sat_calls;
    return r;
}

}  // namespace

BenchRecord run_proposed(const Cascade& c, Seed seed, double timeout_seconds, const SolverOptions& solver) {
    BenchRecord r;
    r.method = "proposed";
    r.n_states = c.tail.state_count();
    r.seed = seed;
    MinimizeOptions options;
    options.deadline = Deadline::after(timeout_seconds);
    options.solver = solver;
    std::size_t calls = 0;
    options.on_encoding = [&](std::size_t, const Cnf&) { ++calls; };
    const auto start = Clock::now();
    try {
        TailResult result = minimize_tail(c.head, c.tail, options);
        r.wall_ms = elapsed_ms(start);
        r.result_states = result.machine.state_count();
        r.sat_calls = result.stats.sat_calls;
        r.skipped_encoding = result.skipped_encoding;
        r.status = "ok";
    } catch (const Timeout&) {
        r = timed_out(r, timeout_seconds, calls);
    } catch (const TooLarge&) {
        r = timed_out(r, timeout_seconds, calls);
    }
    return r;
}

BenchRecord run_naive(const Cascade& c, Seed seed, double timeout_seconds, const SolverOptions& solver) {
    BenchRecord r;
    r.method = "naive";
    r.n_states = c.tail.state_count();
    r.seed = seed;
    NaiveOptions options;
    options.deadline = Deadline::after(timeout_seconds);
    options.solver = solver;
    std::size_t calls = 0;
    options.on_encoding = [&](std::size_t, const Cnf&) { ++calls; };
    const auto start = Clock::now();
    try {
        NaiveResult result = minimize_tail_naive(c.head, c.tail, options);
        r.wall_ms = elapsed_ms(start);
        r.result_states = result.machine.state_count();
        r.sat_calls = result.sat_calls;
        r.status = "ok";
    } catch (const Timeout&) {
        r = timed_out(r, timeout_seconds, calls);
    } catch (const TooLarge&) {
        r = timed_out(r, timeout_seconds, calls);
    }
    return r;
}

std::vector<BenchRecord> bench_compare(const CompareOptions& options) {
    if (options.sizes.empty() || options.seeds.empty()) throw InvalidArgument("sizes and seeds must be nonempty");
    std::vector<BenchRecord> rows;
    for (std::size_t size : options.sizes)
        for (Seed seed : options.seeds) {
            Cascade c = random_cascade(size, size, options.alpha, seed);
            BenchRecord p = run_proposed(c, seed, options.timeout_seconds, options.solver);
            if (options.on_record) options.on_record(p);
            BenchRecord n = run_naive(c, seed, options.timeout_seconds, options.solver);
            if (options.on_record) options.on_record(n);
            if (p.status == "ok" && n.status == "ok" && p.result_states != n.result_states)
                throw Error("methods disagree on size " + std::to_string(size) + " seed " + std::to_string(seed) +
                            ": " + std::to_string(*p.result_states) + " vs " + std::to_string(*n.result_states));
            rows.push_back(std::move(p));
            rows.push_back(std::move(n));
        }
    return rows;
}

std::vector<BenchRecord> bench_bimodal(const BimodalOptions& options) {
    if (options.count == 0) throw InvalidArgument("count must be positive");
    if (options.min_states == 0 || options.min_states > options.max_states) throw InvalidArgument("bad size range");
    std::mt19937_64 rng(options.seed);
    std::vector<BenchRecord> rows;
    for (std::size_t i = 0; i < options.count; ++i) {
        std::size_t size = options.min_states + uniform_below(rng, options.max_states - options.min_states + 1);
        Seed seed = rng();
        Cascade c = random_cascade(size, size, options.alpha, seed);
        BenchRecord r = run_proposed(c, seed, options.timeout_seconds, options.solver);
        if (options.on_record) options.on_record(r);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string format_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << csv_header << '\n';
    for (const BenchRecord& r : records) {
        out << r.method << ',' << r.n_states << ',' << r.seed << ',' << r.wall_ms << ',';
        if (r.result_states) out << *r.result_states;
        out << ',' << r.sat_calls << ',' << (r.skipped_encoding ? "true" : "false") << ',' << r.status << '\n';
    }
    return out.str();
}

namespace {

template <class T>
T parse_unsigned(std::string_view field, std::size_t line, const char* what) {
    T value{};
    auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || end != field.data() + field.size() || field.empty())
        throw ParseError(line, 1, std::string("bad ") + what + " '" + std::string(field) + "'");
    return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) return parts;
        start = pos + 1;
    }
}

}  // namespace

std::vector<BenchRecord> parse_csv(std::string_view text) {
    std::vector<BenchRecord> rows;
    std::size_t line_no = 0;
    bool header = false;
    for (std::string_view line : split(text, '\n')) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        if (!header) {
            if (line != csv_header) throw ParseError(line_no, 1, "unexpected CSV header");
            header = true;
            continue;
        }
        auto f = split(line, ',');
        if (f.size() != 8) throw ParseError(line_no, 1, "expected 8 fields, found " + std::to_string(f.size()));
        BenchRecord r;
        r.method = std::string(f[0]);
        if (r.method != "proposed" && r.method != "naive") throw ParseError(line_no, 1, "unknown method");
        r.n_states = parse_unsigned<std::size_t>(f[1], line_no, "n_states");
        r.seed = parse_unsigned<Seed>(f[2], line_no, "seed");
        r.wall_ms = parse_unsigned<std::uint64_t>(f[3], line_no, "wall_ms");
        if (!f[4].empty()) r.result_states = parse_unsigned<std::size_t>(f[4], line_no, "result_states");
        r.sat_calls = parse_unsigned<std::size_t>(f[5], line_no, "sat_calls");
        if (f[6] == "true") r.skipped_encoding = true;
        else if (f[6] != "false") throw ParseError(line_no, 1, "bad skipped_encoding");
        r.status = std::string(f[7]);
        if (r.status != "ok" && r.status != "timeout") throw ParseError(line_no, 1, "unknown status");
        rows.push_back(std::move(r));
    }
    if (!header) throw ParseError(0, 0, "empty CSV document");
    return rows;
}

std::vector<std::uint64_t> parse_number_list(std::string_view text) {
    std::vector<std::uint64_t> values;
    for (std::string_view item : split(text, ',')) {
        if (item.empty()) throw InvalidArgument("empty item in list '" + std::string(text) + "'");
        std::size_t dots = item.find("..");
        try {
            if (dots == std::string_view::npos) {
                values.push_back(parse_unsigned<std::uint64_t>(item, 0, "number"));
            } else {
                auto lo = parse_unsigned<std::uint64_t>(item.substr(0, dots), 0, "number");
                auto hi = parse_unsigned<std::uint64_t>(item.substr(dots + 2), 0, "number");
                if (lo > hi) throw InvalidArgument("empty range '" + std::string(item) + "'");
                for (auto v = lo; v <= hi; ++v) values.push_back(v);
            }
        } catch (const ParseError& e) {
            throw InvalidArgument(e.what());
        }
    }
    return values;
}

}  // namespace tailopt
