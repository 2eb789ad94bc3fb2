#pragma once

#include <stdexcept>
#include <string>

namespace splitgauge {

// Error categories; mirrored one-to-one by the sg_status codes of the C API.
enum class ErrorKind {
    io,           // file missing, short read, write failure
    format,       // magic/structure violations in a container
    unsupported,  // recognized but out-of-scope format variant (e.g. HDF5 .mat)
    validation,   // data fails a documented invariant
    capacity,     // requested sizes exceed what the inputs can provide
    internal,     // should-not-happen numerical or logic failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
    throw Error(kind, msg);
}

}  // namespace splitgauge
