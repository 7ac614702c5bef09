#pragma once

#include <chrono>
#include <limits>

namespace tailopt {

/// Wall-clock budget shared by the encoders and solvers.
class Deadline {
public:
    using Clock = std::chrono::steady_clock;

    static Deadline never() { return Deadline(Clock::time_point::max()); }
    static Deadline after(double seconds) {
        if (!(seconds < 1e9)) return never();
        return Deadline(Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(seconds)));
    }

    bool expired() const { return at_ != Clock::time_point::max() && Clock::now() >= at_; }
    bool unlimited() const { return at_ == Clock::time_point::max(); }
    double remaining_seconds() const {
        if (unlimited()) return std::numeric_limits<double>::infinity();
        return std::chrono::duration<double>(at_ - Clock::now()).count();
    }

private:
    explicit Deadline(Clock::time_point at) : at_(at) {}
    Clock::time_point at_;
};

}  // namespace tailopt
