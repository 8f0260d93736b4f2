#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hybridir {

enum class ErrorCode {
    kInvalidArgument = 1,
    kParse = 2,
    kValidation = 3,
    kIo = 4,
    kFormat = 5,
    kDimension = 6,
    kNumeric = 7,
};

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

   private:
    ErrorCode code_;
};

class ParseError : public Error {
   public:
    ParseError(const std::string& file, std::size_t line, const std::string& what)
        : Error(ErrorCode::kParse, file + ":" + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

   private:
    std::size_t line_;
};

class ValidationError : public Error {
   public:
    explicit ValidationError(const std::string& what) : Error(ErrorCode::kValidation, what) {}
};

class IoError : public Error {
   public:
    explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

/// Bad magic, unsupported version or truncated binary payload.
class FormatError : public Error {
   public:
    explicit FormatError(const std::string& what) : Error(ErrorCode::kFormat, what) {}
};

class DimensionError : public Error {
   public:
    explicit DimensionError(const std::string& what) : Error(ErrorCode::kDimension, what) {}
};

class NumericError : public Error {
   public:
    explicit NumericError(const std::string& what) : Error(ErrorCode::kNumeric, what) {}
};

class InvalidArgument : public Error {
   public:
    explicit InvalidArgument(const std::string& what) : Error(ErrorCode::kInvalidArgument, what) {}
};

}  // namespace hybridir
