#pragma once

#include <stdexcept>
#include <string>

namespace sldisc {

enum class ErrorKind {
  domain,  // invalid mathematical input or a numerical stage that failed
  io,      // file system failures
  config,  // malformed configuration or input files
};

/// Single exception type used across the library. The C API maps `kind`
/// onto its status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_domain(const std::string& what) {
  throw Error(ErrorKind::domain, what);
}

[[noreturn]] inline void throw_io(const std::string& what) {
  throw Error(ErrorKind::io, what);
}

[[noreturn]] inline void throw_config(const std::string& what) {
  throw Error(ErrorKind::config, what);
}

}  // namespace sldisc
