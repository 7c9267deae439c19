#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gscr {

/// Stable error identifiers. The names are part of the CLI's stderr contract.
enum class ErrorCode {
    NonPositiveReactance,
    DisconnectedFromGround,
    DuplicateBus,
    UnknownBus,
    SelfLoop,
    EliminatingConverterBus,
    SingularInteriorBlock,
    NonConverterBus,
    NonPositiveRatedPower,
    NonFiniteParameter,
    DimensionMismatch,
    DegenerateLeadingEigenvalue,
    BiorthogonalityBreakdown,
    NoBracket,
    InvalidArgument,
    ParseError,
    SchemaError,
    CrossRefError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors raised while reading or validating user configuration.
bool is_config_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, std::string const& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace gscr
