#pragma once

#include <stdexcept>
#include <string>

namespace dte {

enum class ErrorKind {
  kInvalidInput,  // violated precondition (sizes, ranges, non-finite values)
  kDegenerate,    // input is well-formed but the quantity is undefined
  kParse,         // malformed file content
  kIo,            // file could not be opened / written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::kInvalidInput, what);
}

[[noreturn]] inline void throw_degenerate(const std::string& what) {
  throw Error(ErrorKind::kDegenerate, what);
}

}  // namespace dte
