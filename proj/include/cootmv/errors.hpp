#pragma once

#include <stdexcept>
#include <string>

namespace cootmv {

// Broad failure classes; the CLI maps each onto a process exit code.
enum class ErrorKind {
  kConfig,    // bad arguments, missing models, invalid parameters
  kData,      // unreadable or undecodable inputs, degenerate data
  kInternal,  // metric or optimization failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct IoError : Error {
  explicit IoError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

struct FormatError : Error {
  explicit FormatError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

struct ParameterError : Error {
  explicit ParameterError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

struct SegmentationError : Error {
  explicit SegmentationError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

struct TrainingError : Error {
  explicit TrainingError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

struct MetricError : Error {
  explicit MetricError(const std::string& what) : Error(ErrorKind::kInternal, what) {}
};

struct ModelError : Error {
  explicit ModelError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

struct EnhancementError : Error {
  explicit EnhancementError(const std::string& what) : Error(ErrorKind::kInternal, what) {}
};

struct StabilityError : Error {
  explicit StabilityError(const std::string& what) : Error(ErrorKind::kInternal, what) {}
};

}  // namespace cootmv
