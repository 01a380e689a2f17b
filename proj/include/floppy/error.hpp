#pragma once

#include <stdexcept>
#include <string>

namespace floppy {

// Domain error carrying a stable, machine-readable code such as
// "duplicate-edge" or "integration-diverged". what() holds the code
// followed by a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace floppy
