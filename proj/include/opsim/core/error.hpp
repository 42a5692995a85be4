#pragma once

#include <stdexcept>
#include <string>

namespace opsim {

/// Base of every error raised by the engines. `code()` is a stable identifier
/// that the CLI and trace writers surface verbatim.
class Error : public std::runtime_error {
   public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

   private:
    std::string code_;
};

class UnderflowError : public Error {
   public:
    explicit UnderflowError(const std::string& message) : Error("E-UNDERFLOW", message) {}
};

class OverflowError : public Error {
   public:
    explicit OverflowError(const std::string& message) : Error("E-OVERFLOW", message) {}
};

class ValidationError : public Error {
   public:
    explicit ValidationError(const std::string& message) : Error("E-VALIDATION", message) {}
};

class InternalError : public Error {
   public:
    explicit InternalError(const std::string& message) : Error("E-INTERNAL", message) {}
};

}  // namespace opsim
