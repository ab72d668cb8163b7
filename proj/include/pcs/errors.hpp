#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pcs {

/// Rejected configuration value. Carries the offending key and, when the value
/// came from a scenario file, the 1-based source line.
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string key, const std::string& message, std::optional<int> line = {})
        : std::runtime_error(format(key, message, line)), key_(std::move(key)), line_(line)
    {
    }

    [[nodiscard]] const std::string& key() const noexcept { return key_; }
    [[nodiscard]] std::optional<int> line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, const std::string& message,
                              std::optional<int> line)
    {
        std::string out;
        if (line)
            out += "line " + std::to_string(*line) + ": ";
        if (!key.empty())
            out += key + ": ";
        return out + message;
    }

    std::string key_;
    std::optional<int> line_;
};

/// The waiting area could not hold the requested cohort.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation invariant was broken. Always a bug, never bad input.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pcs
