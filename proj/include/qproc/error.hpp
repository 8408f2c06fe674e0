#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qproc {

enum class ErrorCode {
    DuplicateLabel,
    LabelNotFound,
    LabelMismatch,
    BadPermutation,
    DimensionMismatch,
    NotHermitian,
    NotPSD,
    NotUnitary,
    NotAState,
    NotCptp,
    LengthMismatch,
    InvalidPovm,
    InvalidInstrument,
    BadWeights,
    ComponentNotMemoryless,
    NotCausal,
    NotCptpSlice,
    BadParams,
    UnknownName,
    ParseError,
    DimensionOverflow,
    SolverUnavailable,
    NumericalFailure,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {
    }

    ErrorCode code() const noexcept {
        return code_;
    }

  private:
    ErrorCode code_;
};

}  // namespace qproc
