#include "docspace/error.hpp"

namespace docspace {

std::string_view error_slug(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "invalid-argument";
        case ErrorCode::Io: return "io";
        case ErrorCode::Parse: return "parse";
        case ErrorCode::DimensionMismatch: return "dimension-mismatch";
        case ErrorCode::EmptyCorpus: return "empty-corpus";
        case ErrorCode::EmptyVocabulary: return "empty-vocabulary";
        case ErrorCode::ZeroColumn: return "zero-column";
        case ErrorCode::OutOfRange: return "out-of-range";
        case ErrorCode::PerplexityInfeasible: return "perplexity-infeasible";
        case ErrorCode::ZeroVariance: return "zero-variance";
        case ErrorCode::ZeroNorm: return "zero-norm";
        case ErrorCode::Degenerate: return "degenerate";
        case ErrorCode::NotConverged: return "not-converged";
        case ErrorCode::Timeout: return "timeout";
        case ErrorCode::MemoryLimit: return "memory-limit";
        case ErrorCode::NoPairs: return "no-pairs";
        case ErrorCode::UnknownDataset: return "unknown-dataset";
    }
    return "unknown";
}

}  // namespace docspace
