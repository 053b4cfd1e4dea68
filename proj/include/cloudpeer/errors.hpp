#pragma once

#include <stdexcept>
#include <string>

namespace cloudpeer {

// Precondition violations on arguments (empty names, past timestamps, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A raw attribute value or constraint that does not fit the schema.
class SchemaViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DuplicateId : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Routing was asked to start from a node that is not live.
class RoutingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No live path to the key's owner could be found.
class RoutingFailure : public RoutingError {
public:
    using RoutingError::RoutingError;
};

class JoinFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed scenario configuration. `field` carries a JSON-path-like locator.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// A participant observed a state the coordination protocol must never produce.
class ProtocolViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace cloudpeer
