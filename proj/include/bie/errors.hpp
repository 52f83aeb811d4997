#pragma once

#include <stdexcept>
#include <string>

namespace bie {

// Machine-readable failure classes. The CLI prints `error: <class>: <what>` on
// stderr and exits nonzero; library code throws and never calls abort().
enum class errc {
    invalid_argument,
    discretization_singular,
    divergence,
    io_error,
    unsupported,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::invalid_argument: return "invalid_argument";
        case errc::discretization_singular: return "discretization_singular";
        case errc::divergence: return "divergence";
        case errc::io_error: return "io_error";
        case errc::unsupported: return "unsupported";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
    errc code() const noexcept { return code_; }
    const char* code_name() const noexcept { return errc_name(code_); }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& msg) { throw error(c, msg); }

inline void require(bool cond, errc c, const std::string& msg) {
    if (!cond) fail(c, msg);
}

}  // namespace bie
