#pragma once

#include <stdexcept>
#include <string>

namespace hannay {

enum class ErrorKind {
  domain,
  singular_point,
  configuration,
  shape,
  aliasing,
  normalization,
  input,
  degenerate_chain,
  not_a_loop,
  level_set,
  resource,
  stencil,
  step_too_large,
  overlap_domain,
  oracle_domain,
};

const char* to_string(ErrorKind kind) noexcept;

// All library failures are reported through this one exception type; the
// kind lets callers (and the CLI exit-code mapping) tell them apart.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace hannay
