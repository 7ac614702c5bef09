#pragma once

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tailopt/deadline.hpp"

namespace tailopt {

/// Clause list over variables 1..var_count(). Literals are nonzero integers;
/// the sign is the polarity.
class Cnf {
public:
    int new_var() { return ++var_count_; }
    /// Allocates `count` consecutive variables and returns the first.
    int new_vars(int count);
    int var_count() const noexcept { return var_count_; }

    /// Throws InvalidArgument on an empty clause or an out-of-range literal.
    void add_clause(std::span<const int> literals);
    void add_clause(std::initializer_list<int> literals) { add_clause(std::span<const int>(literals.begin(), literals.size())); }

    /// The only way to represent an unsatisfiable-by-construction formula.
    void mark_unsat() noexcept { unsat_ = true; }
    bool marked_unsat() const noexcept { return unsat_; }

    std::size_t clause_count() const noexcept { return starts_.size(); }
    std::size_t literal_count() const noexcept { return literals_.size(); }
    std::span<const int> clause(std::size_t i) const {
        std::size_t end = i + 1 < starts_.size() ? starts_[i + 1] : literals_.size();
        return {literals_.data() + starts_[i], end - starts_[i]};
    }

    void annotate(int var, std::string tag);
    /// Empty when the variable carries no tag.
    std::string_view annotation(int var) const;

private:
    int var_count_ = 0;
    bool unsat_ = false;
    std::vector<int> literals_;
    std::vector<std::size_t> starts_;
    std::vector<std::string> annotations_;
};

enum class SatStatus { sat, unsat, timeout };

const char* to_string(SatStatus s);

struct SatOutcome {
    SatStatus status = SatStatus::timeout;
    /// Indexed by variable; entry 0 is unused. Present iff status == sat.
    std::vector<bool> model;

    bool value(int var) const { return model.at(static_cast<std::size_t>(var)); }
};

/// Index of the first clause the assignment falsifies, if any.
std::optional<std::size_t> first_violated(const Cnf& f, const std::vector<bool>& model);

/// `p cnf <vars> <clauses>` then one clause per line terminated by `0`.
std::string to_dimacs(const Cnf& f);

/// SAT-competition output: `s SATISFIABLE` / `s UNSATISFIABLE` /
/// `s UNKNOWN` plus `v` value lines. Unmentioned variables default to false.
/// Throws SolverError on malformed text.
SatOutcome parse_solver_output(std::string_view text, int var_count);

struct SolverOptions {
    /// External solver executable; the built-in solver is used when empty.
    std::optional<std::filesystem::path> external;
};

/// Reads the TAILOPT_SOLVER environment variable.
std::optional<std::filesystem::path> solver_from_environment();

/// Solves within the deadline. Every returned model is checked against the
/// clauses; a violated clause raises SolverError.
SatOutcome solve(const Cnf& f, const Deadline& deadline, const SolverOptions& options = {});
SatOutcome solve(const Cnf& f, double budget_seconds, const SolverOptions& options = {});

SatOutcome solve_builtin(const Cnf& f, const Deadline& deadline);
/// Runs `solver <file.cnf>` and parses its standard output. Throws SolverError
/// when the executable is missing or its output is malformed.
SatOutcome solve_external(const Cnf& f, const std::filesystem::path& solver, const Deadline& deadline);

}  // namespace tailopt
