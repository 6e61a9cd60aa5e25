#pragma once

#include <stdexcept>
#include <string>

namespace swta {

enum class ErrorKind {
    InvalidScalar,
    DivisionByZero,
    Incompatible,
    PositionError,
    InvalidVector,
    InvalidGate,
    UnsupportedModulus,
    MissingId,
    MissingIdLoop,
    DepthConflict,
    AddRootMismatch,
    ParseError,
    InvalidModel,
    TaskError,
};

inline const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidScalar:      return "InvalidScalar";
        case ErrorKind::DivisionByZero:     return "DivisionByZero";
        case ErrorKind::Incompatible:       return "Incompatible";
        case ErrorKind::PositionError:      return "PositionError";
        case ErrorKind::InvalidVector:      return "InvalidVector";
        case ErrorKind::InvalidGate:        return "InvalidGate";
        case ErrorKind::UnsupportedModulus: return "UnsupportedModulus";
        case ErrorKind::MissingId:          return "MissingId";
        case ErrorKind::MissingIdLoop:      return "MissingIdLoop";
        case ErrorKind::DepthConflict:      return "DepthConflict";
        case ErrorKind::AddRootMismatch:    return "AddRootMismatch";
        case ErrorKind::ParseError:         return "ParseError";
        case ErrorKind::InvalidModel:       return "InvalidModel";
        case ErrorKind::TaskError:          return "TaskError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(error_kind_name(kind)) + ": " + message), kind(kind) {}

    ErrorKind kind;
};

}  // namespace swta
