#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tailopt/generators.hpp"
#include "tailopt/sat.hpp"

namespace tailopt {

struct BenchRecord {
    std::string method;  // "proposed" or "naive"
    std::size_t n_states = 0;
    Seed seed = 0;
    std::uint64_t wall_ms = 0;
    std::optional<std::size_t> result_states;
    std::size_t sat_calls = 0;
    bool skipped_encoding = false;
    std::string status;  // "ok" or "timeout"

    bool operator==(const BenchRecord&) const = default;
};

/// One run of minimize_tail on the cascade. Timeouts and oversized
/// encodings become status "timeout" with wall_ms equal to the budget.
BenchRecord run_proposed(const Cascade& c, Seed seed, double timeout_seconds, const SolverOptions& solver = {});
BenchRecord run_naive(const Cascade& c, Seed seed, double timeout_seconds, const SolverOptions& solver = {});

struct CompareOptions {
    std::vector<std::size_t> sizes;
    std::vector<Seed> seeds;
    std::size_t alpha = 4;
    double timeout_seconds = 600;
    SolverOptions solver;
    std::function<void(const BenchRecord&)> on_record;
};

/// Both methods on random cascades of each size and seed, rows ordered by
/// (size, seed, method). Throws Error when two completed runs disagree on
/// the minimal size.
std::vector<BenchRecord> bench_compare(const CompareOptions& options);

struct BimodalOptions {
    std::size_t count = 200;
    std::size_t min_states = 12;
    std::size_t max_states = 60;
    Seed seed = 7;
    std::size_t alpha = 4;
    double timeout_seconds = 60;
    SolverOptions solver;
    std::function<void(const BenchRecord&)> on_record;
};

/// The proposed method on `count` cascades whose sizes are drawn uniformly
/// from [min_states, max_states].
std::vector<BenchRecord> bench_bimodal(const BimodalOptions& options);

inline constexpr const char* csv_header = "method,n_states,seed,wall_ms,result_states,sat_calls,skipped_encoding,status";

std::string format_csv(const std::vector<BenchRecord>& records);
/// Throws ParseError.
std::vector<BenchRecord> parse_csv(std::string_view text);

/// Parses "1,2,5" and ranges "0..9" (inclusive), or mixtures of both.
std::vector<std::uint64_t> parse_number_list(std::string_view text);

}  // namespace tailopt
