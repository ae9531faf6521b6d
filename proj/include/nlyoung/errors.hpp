// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace nly {

// Error taxonomy. The CLI maps kinds to exit codes:
//   usage/config -> 1, numerical -> 2, I/O -> 3.
enum class ErrorKind {
  invalid_parameter,
  non_convergence,
  no_root,
  insufficient_coverage,
  degenerate_ensemble,
  wrong_plane,
  empty_input,
  insufficient_events,
  config,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

  int exit_code() const {
    switch (kind_) {
      case ErrorKind::config:
        return 1;
      case ErrorKind::io:
        return 3;
      default:
        return 2;
    }
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_error(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace nly
