#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ricf {

/// Base of every error thrown by the library. `kind()` is a stable,
/// machine-readable tag (the CLI prints it verbatim).
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class InvalidVertexError : public Error {
 public:
  explicit InvalidVertexError(const std::string& m) : Error("invalid-vertex", m) {}
};

class InvalidGraphError : public Error {
 public:
  explicit InvalidGraphError(const std::string& m) : Error("invalid-graph", m) {}
};

class CyclicGraphError : public Error {
 public:
  CyclicGraphError(const std::string& m, std::vector<int> cycle)
      : Error("cyclic-graph", m), cycle_(std::move(cycle)) {}

  /// Vertices of one directed cycle, in edge order.
  const std::vector<int>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<int> cycle_;
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& m) : Error("precondition", m) {}
};

class ModelClassError : public Error {
 public:
  explicit ModelClassError(const std::string& m) : Error("model-class", m) {}
};

class ModelMismatchError : public Error {
 public:
  explicit ModelMismatchError(const std::string& m) : Error("model-mismatch", m) {}
};

class NotPositiveDefiniteError : public Error {
 public:
  explicit NotPositiveDefiniteError(const std::string& m) : Error("not-positive-definite", m) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& m) : Error("shape", m) {}
};

class RankDeficiencyError : public Error {
 public:
  RankDeficiencyError(const std::string& m, std::vector<int> columns)
      : Error("rank-deficient", m), columns_(std::move(columns)) {}

  /// Regressor columns found to be linearly dependent on earlier ones.
  const std::vector<int>& dependent_columns() const noexcept { return columns_; }

 private:
  std::vector<int> columns_;
};

class InvalidConfigError : public Error {
 public:
  explicit InvalidConfigError(const std::string& m) : Error("invalid-config", m) {}
};

class EmptyDataError : public Error {
 public:
  explicit EmptyDataError(const std::string& m) : Error("empty-data", m) {}
};

class ParseError : public Error {
 public:
  ParseError(const std::string& m, int line)
      : Error("parse", "line " + std::to_string(line) + ": " + m), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace ricf
