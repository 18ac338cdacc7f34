#pragma once

#include <stdexcept>
#include <string>

namespace coopmds {

enum class ErrorKind {
  invalid_argument,
  inadmissible,  // parameter or (F, R) combination the construction does not support
  verification,  // parity or checksum failure
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace coopmds
