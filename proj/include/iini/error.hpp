#pragma once

#include <stdexcept>
#include <string>

namespace iini {

/// Runtime failure carrying a stable machine-readable name alongside the
/// human-readable detail. The CLI prints "<name>: <detail>" on stderr and
/// exits nonzero; tests match on name().
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& detail)
        : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

}  // namespace iini
