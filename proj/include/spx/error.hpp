#pragma once

#include <stdexcept>
#include <string>

namespace spx {

enum class ErrorCode {
    InvalidArgument = 1,
    Io,
    Parameter,
    InvalidState,
    DegenerateRegion,
    DegenerateGeometry,
    Initialization,
    TrackingFailure,
    Ingestion,
    Internal,
};

// Every failure raised by the library carries one of the codes above so the
// C layer can map it onto a stable integer.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace spx
