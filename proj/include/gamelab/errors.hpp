#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gamelab {

// Configuration document could not be turned into a typed GameConfig.
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { syntax, missing_field, type_mismatch, invariant };

  ConfigError(Kind kind, std::string path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message),
        kind_(kind),
        path_(std::move(path)) {}

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }

 private:
  Kind kind_;
  std::string path_;
};

// Template source is malformed or does not cover the configured languages.
class TemplateError : public std::runtime_error {
 public:
  enum class Kind { unknown_placeholder, missing_placeholder, missing_language };

  TemplateError(Kind kind, const std::string& message, size_t offset = 0)
      : std::runtime_error(message), kind_(kind), offset_(offset) {}

  Kind kind() const { return kind_; }
  size_t offset() const { return offset_; }

 private:
  Kind kind_;
  size_t offset_;
};

// A provider call failed in a way the gateway will not retry.
class GatewayError : public std::runtime_error {
 public:
  enum class Kind { auth_error, exhausted_retries, malformed_provider_response };

  GatewayError(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

// An agent backend could not produce a usable decision or message within its
// retry budget. The engine turns this into an agent_failure termination.
class AgentFailure : public std::runtime_error {
 public:
  AgentFailure(std::string agent_name, const std::string& message)
      : std::runtime_error(message), agent_name_(std::move(agent_name)) {}

  const std::string& agent_name() const { return agent_name_; }

 private:
  std::string agent_name_;
};

}  // namespace gamelab
