#pragma once

#include <stdexcept>
#include <string>

namespace moltiming {

enum class ErrorCode {
  no_sign_change,
  max_iterations,
  non_finite,
  domain,
  bad_weights,
  length_mismatch,
  target_unreachable,
};

const char* to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace moltiming
