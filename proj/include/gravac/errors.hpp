#pragma once

#include <stdexcept>
#include <string>

namespace gravac {

// Failure classes map to CLI exit codes: parse=2, precondition=3, numerical=4.
enum class ErrorClass { Parse = 2, Precondition = 3, Numerical = 4 };

class Error : public std::runtime_error {
  public:
    Error(ErrorClass cls, std::string kind, const std::string& what)
        : std::runtime_error(kind + ": " + what), cls_(cls), kind_(std::move(kind)) {}
    ErrorClass error_class() const { return cls_; }
    const std::string& kind() const { return kind_; }

  private:
    ErrorClass cls_;
    std::string kind_;
};

struct PreconditionError : Error {
    PreconditionError(const std::string& kind, const std::string& what)
        : Error(ErrorClass::Precondition, kind, what) {}
};

struct NumericalError : Error {
    NumericalError(const std::string& kind, const std::string& what)
        : Error(ErrorClass::Numerical, kind, what) {}
};

struct ParseError : Error {
    ParseError(const std::string& what) : Error(ErrorClass::Parse, "ParseError", what) {}
};

}  // namespace gravac
