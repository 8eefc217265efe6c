#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qagame {

/// Malformed input file or record. `line` is 1-based, 0 when unknown.
class LoadError : public std::runtime_error {
public:
    LoadError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A record failed to parse. `position` is a byte offset within the record.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error("parse error at " + std::to_string(position) + ": " + what),
          position_(position) {}
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Operation not legal in the object's current state.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class NotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace qagame
