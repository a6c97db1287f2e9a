#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mesonet {

enum class ErrorCode {
  io,
  parse,
  invalid_argument,
  insufficient_data,
  degenerate,
  unknown_ticker,
  window_out_of_range,
  config,
  numerical,
};

/// Stable machine-readable name, e.g. "E_PARSE".
std::string_view code_name(ErrorCode code);

/// Process exit status used by the CLI for a given code (always nonzero).
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mesonet
