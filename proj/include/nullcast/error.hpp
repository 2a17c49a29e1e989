#ifndef NULLCAST_ERROR_HPP
#define NULLCAST_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace nullcast {

enum class ErrorCode {
  RankDeficient,
  EmptyNullSpace,
  NotUnitary,
  DimensionMismatch,
  NotOrthonormal,
  BadDimensions,
  SpecInfeasible,
  ZeroProjector,
  DegenerateColumn,
  BadFftSize,
  DegeneratePolynomial,
  Infeasible,
  ColumnUndefined,
  SingularCovariance,
  BadProbability,
  BlockLengthMismatch,
  NonConvergence,
  ZeroVector,
  ConfigInvalid,
  IoError,
  EmptyInput,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::EmptyNullSpace: return "EmptyNullSpace";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::SpecInfeasible: return "SpecInfeasible";
    case ErrorCode::ZeroProjector: return "ZeroProjector";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::BadFftSize: return "BadFftSize";
    case ErrorCode::DegeneratePolynomial: return "DegeneratePolynomial";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::ColumnUndefined: return "ColumnUndefined";
    case ErrorCode::SingularCovariance: return "SingularCovariance";
    case ErrorCode::BadProbability: return "BadProbability";
    case ErrorCode::BlockLengthMismatch: return "BlockLengthMismatch";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyInput: return "EmptyInput";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so callers
/// (and the CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace nullcast

#endif  // NULLCAST_ERROR_HPP
