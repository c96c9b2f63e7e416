#include "tarp/error.hpp"

namespace tarp {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ingestion: return "ingestion";
        case ErrorKind::dimension: return "dimension";
        case ErrorKind::parameter: return "parameter";
        case ErrorKind::degenerate: return "degenerate";
        case ErrorKind::io: return "io";
        case ErrorKind::internal: return "internal";
    }
    return "unknown";
}

}  // namespace tarp
