#pragma once

#include <stdexcept>
#include <string>

namespace bpekit {

// Invalid configuration (bad vocabulary size, weights, fractions, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Unreadable or malformed input data (corpus files, id streams, ...).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Model files or in-memory models that violate the vocabulary contract.
class ModelError : public std::runtime_error {
 public:
  explicit ModelError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bpekit
