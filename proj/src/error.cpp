#include "mesonet/error.hpp"

namespace mesonet {

std::string_view code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::io: return "E_IO";
    case ErrorCode::parse: return "E_PARSE";
    case ErrorCode::invalid_argument: return "E_ARG";
    case ErrorCode::insufficient_data: return "E_DATA";
    case ErrorCode::degenerate: return "E_DEGENERATE";
    case ErrorCode::unknown_ticker: return "E_UNKNOWN_TICKER";
    case ErrorCode::window_out_of_range: return "E_WINDOW";
    case ErrorCode::config: return "E_CONFIG";
    case ErrorCode::numerical: return "E_NUMERIC";
  }
  return "E_UNKNOWN";
}

int exit_status(ErrorCode code) {
  return 10 + static_cast<int>(code);
}

}  // namespace mesonet
