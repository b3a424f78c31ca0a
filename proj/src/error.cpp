#include "kcent/error.hpp"

namespace kcent {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::EmptyGraph: return "EmptyGraph";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::UnknownEdge: return "UnknownEdge";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::EmptyRetainSet: return "EmptyRetainSet";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BadSpectrumBound: return "BadSpectrumBound";
    case ErrorCode::SpectrumViolation: return "SpectrumViolation";
    case ErrorCode::WeightsOutOfRange: return "WeightsOutOfRange";
    case ErrorCode::SameVertex: return "SameVertex";
    case ErrorCode::CoverageViolation: return "CoverageViolation";
    case ErrorCode::DenominatorUnderflow: return "DenominatorUnderflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateNodeId: return "DuplicateNodeId";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ZeroMean: return "ZeroMean";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace kcent
