#include "pskfade/error.hpp"

namespace pskfade {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::InvalidInterval: return "InvalidInterval";
        case ErrorKind::NonConvergence: return "NonConvergence";
        case ErrorKind::DivergentTail: return "DivergentTail";
        case ErrorKind::Divergent: return "Divergent";
        case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::AliasTruncation: return "AliasTruncation";
        case ErrorKind::NotRegular: return "NotRegular";
        case ErrorKind::EmbeddingFailure: return "EmbeddingFailure";
        case ErrorKind::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace pskfade
