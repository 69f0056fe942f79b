#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cosched {

// Domain error with a stable machine-parsable code. The CLI prints failures
// as a single "code: message" line and exits nonzero.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

} // namespace cosched
