#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace propdet {

/// Unreadable or missing input file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data. Carries the file and 1-based line when known.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(compose(file, line, what)), file_(file), line_(line) {}
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}

  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  static std::string compose(const std::string& file, std::size_t line, const std::string& what) {
    std::string out = file;
    if (line > 0) out += ":" + std::to_string(line);
    if (!out.empty()) out += ": ";
    return out + what;
  }

  std::string file_;
  std::size_t line_ = 0;
};

/// Mismatched tensor or vector shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent configuration, e.g. a model trained with a different feature set.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Training diverged (NaN/inf loss).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Embedding table has no row for a requested key.
class MissingEmbedding : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace propdet
