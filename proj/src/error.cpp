#include "stackeval/error.hpp"

namespace stackeval {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::InvalidKnowledgeBase: return "InvalidKnowledgeBase";
    case ErrorCode::UnknownShape: return "UnknownShape";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Immovable: return "Immovable";
    case ErrorCode::CollisionAtTarget: return "CollisionAtTarget";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::DegenerateTrace: return "DegenerateTrace";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NoFlatHabitat: return "NoFlatHabitat";
    case ErrorCode::Unsolvable: return "Unsolvable";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::UnknownScenario: return "UnknownScenario";
    case ErrorCode::NetworkError: return "NetworkError";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::MalformedResponse: return "MalformedResponse";
  }
  return "Error";
}

}  // namespace stackeval
