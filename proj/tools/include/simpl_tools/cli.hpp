#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace simpl::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailure = 1,
  kIoFailure = 2,
  kGenerationFailure = 3,
};

struct CommandOutcome {
  int exit_code = kSuccess;
  std::string summary;
  std::optional<std::filesystem::path> report_path;
};

// Runs one `simpl` command. `args` excludes the program name. Reports go to
// `out`; logs, usage text and diagnostics go to `err`.
CommandOutcome dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace simpl::cli
