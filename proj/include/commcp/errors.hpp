#pragma once

#include <stdexcept>
#include <string>

namespace commcp {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

struct AssignmentError : std::runtime_error {
  explicit AssignmentError(const std::string& what) : std::runtime_error(what) {}
};

struct DuplicateAnswerError : std::runtime_error {
  explicit DuplicateAnswerError(const std::string& what) : std::runtime_error(what) {}
};

struct EmptyCalibrationError : std::runtime_error {
  explicit EmptyCalibrationError(const std::string& what) : std::runtime_error(what) {}
};

struct ExternalBackendError : std::runtime_error {
  explicit ExternalBackendError(const std::string& what) : std::runtime_error(what) {}
};

struct PositionOutOfBounds : std::runtime_error {
  explicit PositionOutOfBounds(const std::string& what) : std::runtime_error(what) {}
};

struct NoFrontierError : std::runtime_error {
  explicit NoFrontierError(const std::string& what) : std::runtime_error(what) {}
};

struct UnreachableError : std::runtime_error {
  explicit UnreachableError(const std::string& what) : std::runtime_error(what) {}
};

struct ScenarioError : std::runtime_error {
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct InsufficientDataError : std::runtime_error {
  explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace commcp
