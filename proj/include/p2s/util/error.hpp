#pragma once

#include <stdexcept>
#include <string>

namespace p2s {

/// Base of every error the pipeline throws. Callers that need to keep a
/// suite alive catch this and record the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The configured external tool (dafny, vitis_hls, ...) could not be found.
class ToolNotFound : public Error {
 public:
  explicit ToolNotFound(const std::string& tool)
      : Error("tool not found: " + tool), tool_(tool) {}
  const std::string& tool() const { return tool_; }

 private:
  std::string tool_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace p2s
