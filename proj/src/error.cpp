#include "gscr/error.hpp"

namespace gscr {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NonPositiveReactance: return "NonPositiveReactance";
        case ErrorCode::DisconnectedFromGround: return "DisconnectedFromGround";
        case ErrorCode::DuplicateBus: return "DuplicateBus";
        case ErrorCode::UnknownBus: return "UnknownBus";
        case ErrorCode::SelfLoop: return "SelfLoop";
        case ErrorCode::EliminatingConverterBus: return "EliminatingConverterBus";
        case ErrorCode::SingularInteriorBlock: return "SingularInteriorBlock";
        case ErrorCode::NonConverterBus: return "NonConverterBus";
        case ErrorCode::NonPositiveRatedPower: return "NonPositiveRatedPower";
        case ErrorCode::NonFiniteParameter: return "NonFiniteParameter";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::DegenerateLeadingEigenvalue: return "DegenerateLeadingEigenvalue";
        case ErrorCode::BiorthogonalityBreakdown: return "BiorthogonalityBreakdown";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::CrossRefError: return "CrossRefError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

bool is_config_error(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ParseError:
        case ErrorCode::SchemaError:
        case ErrorCode::CrossRefError:
        case ErrorCode::IoError:
            return true;
        default:
            return false;
    }
}

}  // namespace gscr
