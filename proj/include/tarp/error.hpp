#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tarp {

enum class ErrorKind {
    ingestion,   // malformed or non-finite input data
    dimension,   // shape mismatch or too few rows/columns
    parameter,   // tuning parameter outside its admissible range
    degenerate,  // numerically degenerate input (e.g. all-zero utilities)
    io,          // file system failures
    internal     // broken invariant inside the library
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, ErrorKind kind, const std::string& what) {
    if (!condition) fail(kind, what);
}

}  // namespace tarp
