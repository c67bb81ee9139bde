#pragma once

#include <stdexcept>
#include <string>

namespace cbboost {

// Raised when an input violates an operation's precondition. The message is
// intended to be a single line, suitable for machine parsing by callers.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

} // namespace cbboost
