#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stackeval {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  InvalidKnowledgeBase,
  UnknownShape,
  InvalidSpec,
  Immovable,
  CollisionAtTarget,
  NonTermination,
  UnknownObject,
  DegenerateTrace,
  InsufficientData,
  NoFlatHabitat,
  Unsolvable,
  ShapeMismatch,
  EmptyGrid,
  UnknownScenario,
  NetworkError,
  AuthError,
  MalformedResponse,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stackeval
