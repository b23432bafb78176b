#include "maglev/error.hpp"

namespace maglev {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonPositiveInput: return "NonPositiveInput";
        case ErrorCode::TransverseTrapUndefined: return "TransverseTrapUndefined";
        case ErrorCode::NegativeJ: return "NegativeJ";
        case ErrorCode::AsymmetricInput: return "AsymmetricInput";
        case ErrorCode::RootSolverFailure: return "RootSolverFailure";
        case ErrorCode::NoSignChange: return "NoSignChange";
        case ErrorCode::NotStable: return "NotStable";
        case ErrorCode::ZeroNormVector: return "ZeroNormVector";
        case ErrorCode::NonPositiveBlockDeterminant: return "NonPositiveBlockDeterminant";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

}  // namespace maglev
