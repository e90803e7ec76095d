#include "ftpl/errors.hpp"

#include <fmt/format.h>

namespace ftpl {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidParameters: return "InvalidParameters";
        case ErrorKind::ReducibleChain: return "ReducibleChain";
        case ErrorKind::NonPositiveState: return "NonPositiveState";
        case ErrorKind::NonPositiveMarginal: return "NonPositiveMarginal";
        case ErrorKind::UnsupportedBorrowingLimit: return "UnsupportedBorrowingLimit";
        case ErrorKind::RateBelowNegDepreciation: return "RateBelowNegDepreciation";
        case ErrorKind::InvalidRate: return "InvalidRate";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
        case ErrorKind::DegenerateNullSpace: return "DegenerateNullSpace";
        case ErrorKind::GridMismatch: return "GridMismatch";
        case ErrorKind::OutOfSweepRange: return "OutOfSweepRange";
        case ErrorKind::ScanTooCoarse: return "ScanTooCoarse";
        case ErrorKind::ZeroAssetDemand: return "ZeroAssetDemand";
        case ErrorKind::RootLost: return "RootLost";
        case ErrorKind::NonMonetary: return "NonMonetary";
        case ErrorKind::ConfigSyntax: return "ConfigSyntax";
        case ErrorKind::ConfigDomain: return "ConfigDomain";
    }
    return "Unknown";
}

NonConvergenceError::NonConvergenceError(int iterations, double residual)
    : Error(ErrorKind::NonConvergence,
            fmt::format("residual {:.3e} after {} iterations", residual, iterations)),
      iterations_(iterations),
      residual_(residual) {}

}  // namespace ftpl
