#pragma once

#include <stdexcept>
#include <string>

namespace finegrain {

// Error taxonomy for the library. Everything derives from std::runtime_error
// so callers that do not care about the category can catch one type.

// Bad values fed to a numeric routine (non-finite logits, empty batch, ...).
class InvalidInputError : public std::runtime_error {
 public:
  explicit InvalidInputError(const std::string& what) : std::runtime_error(what) {}
};

// Invalid configuration: out-of-range hyperparameters, unknown enum names,
// inconsistent training settings.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A dataset violated a pipeline precondition (e.g. a blank label reached the
// objective layer).
class DatasetError : public std::runtime_error {
 public:
  explicit DatasetError(const std::string& what) : std::runtime_error(what) {}
};

// A metric is undefined on the given input (e.g. AUC with an empty group).
class MetricError : public std::runtime_error {
 public:
  explicit MetricError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file content; message carries the file/line context.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace finegrain
