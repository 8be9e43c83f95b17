#pragma once

#include <stdexcept>
#include <string>

namespace lungbench {

// Every failure raised by the library carries a short dotted code
// ("wav.channels", "labels.order", ...) so the CLI can emit it as JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace lungbench
