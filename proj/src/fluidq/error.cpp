#include "fluidq/error.hpp"

namespace fluidq {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::NonGenerator: return "NonGenerator";
        case ErrorCode::ZeroRate: return "ZeroRate";
        case ErrorCode::EmptySide: return "EmptySide";
        case ErrorCode::Reducible: return "Reducible";
        case ErrorCode::Singular: return "Singular";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::DegenerateDiagonal: return "DegenerateDiagonal";
        case ErrorCode::BadParams: return "BadParams";
        case ErrorCode::SingularQ: return "SingularQ";
        case ErrorCode::SingularCascade: return "SingularCascade";
        case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
        case ErrorCode::NonUnitRates: return "NonUnitRates";
        case ErrorCode::BadPsi: return "BadPsi";
        case ErrorCode::Inconsistent: return "Inconsistent";
        case ErrorCode::NeedPsi: return "NeedPsi";
        case ErrorCode::RateTooSmall: return "RateTooSmall";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Parse: return "Parse";
    }
    return "Unknown";
}

}  // namespace fluidq
