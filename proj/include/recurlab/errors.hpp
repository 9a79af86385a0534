#pragma once

#include <stdexcept>
#include <string>

namespace recurlab {

/// Error taxonomy shared by every module; the CLI maps invalid_input to
/// exit code 2 and everything else to a diagnostic before exit 1.
enum class ErrorKind {
    invalid_input,
    size_limit,
    certification_failure,
    construction_failure,
    dimension_mismatch,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& msg) {
    throw Error(ErrorKind::invalid_input, msg);
}
[[noreturn]] inline void throw_size_limit(const std::string& msg) {
    throw Error(ErrorKind::size_limit, msg);
}
[[noreturn]] inline void throw_certification(const std::string& msg) {
    throw Error(ErrorKind::certification_failure, msg);
}
[[noreturn]] inline void throw_construction(const std::string& msg) {
    throw Error(ErrorKind::construction_failure, msg);
}
[[noreturn]] inline void throw_dimension(const std::string& msg) {
    throw Error(ErrorKind::dimension_mismatch, msg);
}

} // namespace recurlab
