#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sdmap {

enum class Errc {
    invalid_argument,
    overflow,
    diverged,
    no_real_fixed_points,
    period_divisible_by_3,
    lift_validation_failed,
    count_mismatch,
    no_event_in_bracket,
    branch_lost,
    palette_missing_label,
};

constexpr std::string_view to_string(Errc code) {
    switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::overflow: return "overflow";
    case Errc::diverged: return "diverged";
    case Errc::no_real_fixed_points: return "no_real_fixed_points";
    case Errc::period_divisible_by_3: return "period_divisible_by_3";
    case Errc::lift_validation_failed: return "lift_validation_failed";
    case Errc::count_mismatch: return "count_mismatch";
    case Errc::no_event_in_bracket: return "no_event_in_bracket";
    case Errc::branch_lost: return "branch_lost";
    case Errc::palette_missing_label: return "palette_missing_label";
    }
    return "unknown";
}

/// Base error for every failure the library reports.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

/// An orbit left the escape ball; `step()` is the index of the first escaped state.
class DivergedError : public Error {
public:
    explicit DivergedError(std::size_t step)
        : Error(Errc::diverged, "orbit left the escape ball at step " + std::to_string(step)),
          step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

} // namespace sdmap
