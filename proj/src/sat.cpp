#include "tailopt/sat.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include "cdcl.hpp"
#include "tailopt/error.hpp"
#include "tailopt/machine_io.hpp"

namespace tailopt {

int Cnf::new_vars(int count) {
    if (count < 0) throw InvalidArgument("negative variable count");
    int first = var_count_ + 1;
    var_count_ += count;
    return first;
}

void Cnf::add_clause(std::span<const int> literals) {
    if (literals.empty()) throw InvalidArgument("empty clause; use mark_unsat()");
    for (int l : literals)
        if (l == 0 || l > var_count_ || -l > var_count_)
            throw InvalidArgument("literal " + std::to_string(l) + " out of range");
    starts_.push_back(literals_.size());
    literals_.insert(literals_.end(), literals.begin(), literals.end());
}

void Cnf::annotate(int var, std::string tag) {
    if (var <= 0 || var > var_count_) throw InvalidArgument("annotation for unknown variable");
    if (annotations_.size() <= static_cast<std::size_t>(var)) annotations_.resize(static_cast<std::size_t>(var) + 1);
    annotations_[static_cast<std::size_t>(var)] = std::move(tag);
}

std::string_view Cnf::annotation(int var) const {
    if (var <= 0 || static_cast<std::size_t>(var) >= annotations_.size()) return {};
    return annotations_[static_cast<std::size_t>(var)];
}

const char* to_string(SatStatus s) {
    switch (s) {
        case SatStatus::sat: return "SAT";
        case SatStatus::unsat: return "UNSAT";
        case SatStatus::timeout: return "TIMEOUT";
    }
    return "?";
}

std::optional<std::size_t> first_violated(const Cnf& f, const std::vector<bool>& model) {
    if (model.size() < static_cast<std::size_t>(f.var_count()) + 1) return 0;
    if (f.marked_unsat()) return 0;
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        bool satisfied = false;
        for (int l : f.clause(i)) {
            if (model[static_cast<std::size_t>(l > 0 ? l : -l)] == (l > 0)) {
                satisfied = true;
                break;
            }
        }
        if (!satisfied) return i;
    }
    return std::nullopt;
}

std::string to_dimacs(const Cnf& f) {
    std::string text;
    text.reserve(f.literal_count() * 6 + f.clause_count() * 3 + 32);
    const std::size_t clauses = f.clause_count() + (f.marked_unsat() ? 1 : 0);
    text += "p cnf " + std::to_string(f.var_count()) + ' ' + std::to_string(clauses) + '\n';
    for (std::size_t i = 0; i < f.clause_count(); ++i) {
        for (int l : f.clause(i)) {
            text += std::to_string(l);
            text += ' ';
        }
        text += "0\n";
    }
    if (f.marked_unsat()) text += "0\n";
    return text;
}

SatOutcome parse_solver_output(std::string_view text, int var_count) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::optional<SatStatus> status;
    std::vector<bool> model(static_cast<std::size_t>(var_count) + 1, false);
    bool saw_values = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == 'c') continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "s") {
            std::string word;
            ls >> word;
            SatStatus parsed;
            if (word == "SATISFIABLE") parsed = SatStatus::sat;
            else if (word == "UNSATISFIABLE") parsed = SatStatus::unsat;
            else if (word == "UNKNOWN" || word == "INDETERMINATE") parsed = SatStatus::timeout;
            else throw SolverError("malformed solver status line: '" + line + "'");
            if (status && *status != parsed) throw SolverError("conflicting solver status lines");
            status = parsed;
        } else if (tag == "v") {
            saw_values = true;
            std::string tok;
            while (ls >> tok) {
                long value = 0;
                try {
                    std::size_t used = 0;
                    value = std::stol(tok, &used);
                    if (used != tok.size()) throw std::invalid_argument(tok);
                } catch (const std::exception&) {
                    throw SolverError("malformed value literal '" + tok + "'");
                }
                if (value == 0) continue;
                long v = value > 0 ? value : -value;
                if (v > var_count) throw SolverError("value line mentions unknown variable " + std::to_string(v));
                model[static_cast<std::size_t>(v)] = value > 0;
            }
        } else {
            // Solvers print assorted banners; only unknown single-letter tags are errors.
            if (tag.size() == 1) throw SolverError("unexpected solver output line: '" + line + "'");
        }
    }
    if (!status) throw SolverError("solver output has no status line");
    SatOutcome outcome;
    outcome.status = *status;
    if (*status == SatStatus::sat) {
        if (!saw_values && var_count > 0) throw SolverError("satisfiable answer without value lines");
        outcome.model = std::move(model);
    }
    return outcome;
}

std::optional<std::filesystem::path> solver_from_environment() {
    const char* env = std::getenv("TAILOPT_SOLVER");
    if (env == nullptr || *env == '\0') return std::nullopt;
    return std::filesystem::path(env);
}

SatOutcome solve_builtin(const Cnf& f, const Deadline& deadline) {
    detail::CdclSolver solver(f);
    SatOutcome outcome;
    outcome.status = solver.solve(deadline);
    if (outcome.status == SatStatus::sat) outcome.model = solver.model();
    return outcome;
}

namespace {

class TempDir {
public:
    TempDir() {
        std::string pattern = (std::filesystem::temp_directory_path() / "tailopt-XXXXXX").string();
        if (::mkdtemp(pattern.data()) == nullptr) throw SolverError("cannot create temporary directory");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace

SatOutcome solve_external(const Cnf& f, const std::filesystem::path& solver, const Deadline& deadline) {
    if (::access(solver.c_str(), X_OK) != 0) throw SolverError("external solver not found: " + solver.string());
    TempDir dir;
    const auto cnf_path = dir.path() / "formula.cnf";
    const auto out_path = dir.path() / "solver.out";
    write_text_file(cnf_path, to_dimacs(f));

    pid_t pid = ::fork();
    if (pid < 0) throw SolverError("fork failed");
    if (pid == 0) {
        int fd = ::open(out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
        if (fd < 0) ::_exit(127);
        ::dup2(fd, STDOUT_FILENO);
        int null = ::open("/dev/null", O_WRONLY);
        if (null >= 0) ::dup2(null, STDERR_FILENO);
        ::execl(solver.c_str(), solver.c_str(), cnf_path.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    int wstatus = 0;
    while (true) {
        pid_t r = ::waitpid(pid, &wstatus, WNOHANG);
        if (r == pid) break;
        if (r < 0) throw SolverError("waitpid failed");
        if (deadline.expired()) {
            ::kill(pid, SIGKILL);
            ::waitpid(pid, &wstatus, 0);
            return SatOutcome{SatStatus::timeout, {}};
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 127)
        throw SolverError("external solver could not be executed: " + solver.string());
    return parse_solver_output(read_text_file(out_path), f.var_count());
}

SatOutcome solve(const Cnf& f, const Deadline& deadline, const SolverOptions& options) {
    SatOutcome outcome = options.external ? solve_external(f, *options.external, deadline) : solve_builtin(f, deadline);
    if (outcome.status == SatStatus::sat) {
        if (auto bad = first_violated(f, outcome.model))
            throw SolverError("solver model violates clause " + std::to_string(*bad));
    } else {
        outcome.model.clear();
    }
    return outcome;
}

SatOutcome solve(const Cnf& f, double budget_seconds, const SolverOptions& options) {
    return solve(f, Deadline::after(budget_seconds), options);
}

}  // namespace tailopt
