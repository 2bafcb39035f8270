#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "metricforge/errors.hpp"
#include "metricforge/models.hpp"
#include "metricforge/phase.hpp"

namespace metricforge::cli {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitPhase = 2;      // broken phase, phase violation, malformed axis
inline constexpr int kExitDefective = 3;  // exceptional point / defective system
inline constexpr int kExitParse = 4;      // malformed input or flags

int exit_code_for(ErrorCode code) noexcept;

/// A failure detected by the CLI layer itself, with its own exit code.
class UsageFailure : public std::runtime_error {
 public:
  UsageFailure(int exit_code, std::string code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code), code_(std::move(code)) {}
  int exit_code() const noexcept { return exit_code_; }
  const std::string& code() const noexcept { return code_; }

 private:
  int exit_code_;
  std::string code_;
};

/// "a=1,b=2.5" -> {a: 1, b: 2.5}. Throws Error(parse_error).
ParamMap parse_params(std::string_view text);

/// "name=start:stop:count". Throws UsageFailure with exit code 2.
Axis parse_axis(std::string_view text);

/// Runs one invocation (args exclude the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace metricforge::cli
