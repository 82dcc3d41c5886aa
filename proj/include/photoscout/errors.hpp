#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace photoscout {

// Root of every error the engine raises. Callers that only need a message can
// catch this; the service and CLI map the concrete types onto status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ----------------------------------------------------------------------------
// DSL
// ----------------------------------------------------------------------------

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error("syntax error at " + std::to_string(position) + ": " + message),
        position_(position),
        detail_(message) {}

  std::size_t position() const noexcept { return position_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t position_;
  std::string detail_;
};

class UnboundVariable : public Error {
 public:
  explicit UnboundVariable(std::string name)
      : Error("unbound variable '" + name + "'"), name_(std::move(name)) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class ArityError : public Error {
 public:
  ArityError(std::string relation, std::size_t got, std::size_t want)
      : Error(relation + " expects " + std::to_string(want) + " arguments, got " +
              std::to_string(got)),
        relation_(std::move(relation)),
        got_(got),
        want_(want) {}

  const std::string& relation() const noexcept { return relation_; }
  std::size_t got() const noexcept { return got_; }
  std::size_t want() const noexcept { return want_; }

 private:
  std::string relation_;
  std::size_t got_;
  std::size_t want_;
};

// ----------------------------------------------------------------------------
// Annotations
// ----------------------------------------------------------------------------

class SchemaError : public Error {
 public:
  SchemaError(std::string file, const std::string& detail)
      : Error(file + ": " + detail), file_(std::move(file)) {}
  const std::string& file() const noexcept { return file_; }

 private:
  std::string file_;
};

class DuplicateImageId : public Error {
 public:
  explicit DuplicateImageId(std::string id)
      : Error("duplicate image id '" + id + "'"), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class UnknownCluster : public Error {
 public:
  explicit UnknownCluster(const std::string& target)
      : Error("unknown tag target '" + target + "'") {}
};

class TagConflict : public Error {
 public:
  using Error::Error;
};

class UnknownRelation : public Error {
 public:
  explicit UnknownRelation(const std::string& rel) : Error("unknown relation '" + rel + "'") {}
};

// ----------------------------------------------------------------------------
// Evaluation and synthesis
// ----------------------------------------------------------------------------

class UnknownConstant : public Error {
 public:
  explicit UnknownConstant(std::string constant)
      : Error("unknown constant '" + constant + "'"), constant_(std::move(constant)) {}
  const std::string& constant() const noexcept { return constant_; }

 private:
  std::string constant_;
};

// A program handed to the evaluator still contains holes.
class IncompleteProgram : public Error {
 public:
  using Error::Error;
};

class EmptyDomain : public Error {
 public:
  explicit EmptyDomain(int hole_id)
      : Error("hole ?" + std::to_string(hole_id) + " has an empty domain"), hole_id_(hole_id) {}
  int hole_id() const noexcept { return hole_id_; }

 private:
  int hole_id_;
};

class InvalidExamples : public Error {
 public:
  using Error::Error;
};

// ----------------------------------------------------------------------------
// Sketch sources
// ----------------------------------------------------------------------------

class EndpointTimeout : public Error {
 public:
  using Error::Error;
};

class EndpointError : public Error {
 public:
  EndpointError(int status, const std::string& message)
      : Error("LLM endpoint returned " + std::to_string(status) + ": " + message),
        status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class SketchSourceUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace photoscout
