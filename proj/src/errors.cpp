#include "respire/errors.hpp"

namespace respire {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ok: return "ok";
        case ErrorCode::format: return "format";
        case ErrorCode::unsupported: return "unsupported";
        case ErrorCode::empty_input: return "empty_input";
        case ErrorCode::all_silent: return "all_silent";
        case ErrorCode::parameter: return "parameter";
        case ErrorCode::schema: return "schema";
        case ErrorCode::ingest: return "ingest";
        case ErrorCode::pairing: return "pairing";
        case ErrorCode::fold: return "fold";
        case ErrorCode::metric: return "metric";
        case ErrorCode::degenerate_labels: return "degenerate_labels";
        case ErrorCode::degenerate_variance: return "degenerate_variance";
        case ErrorCode::io: return "io";
        case ErrorCode::internal: return "internal";
    }
    return "internal";
}

}  // namespace respire
