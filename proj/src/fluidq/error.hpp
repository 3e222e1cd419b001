#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fluidq {

// Stable numeric values: these are mirrored one-to-one by fq_status in the C header.
enum class ErrorCode : int {
    InvalidArgument = 1,
    NonGenerator = 2,
    ZeroRate = 3,
    EmptySide = 4,
    Reducible = 5,
    Singular = 6,
    NoConvergence = 7,
    DegenerateDiagonal = 8,
    BadParams = 9,
    SingularQ = 10,
    SingularCascade = 11,
    MaxIterExceeded = 12,
    NonUnitRates = 13,
    BadPsi = 14,
    Inconsistent = 15,
    NeedPsi = 16,
    RateTooSmall = 17,
    Io = 18,
    Parse = 19,
};

[[nodiscard]] std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fluidq
