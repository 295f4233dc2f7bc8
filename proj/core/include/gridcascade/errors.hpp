#pragma once

#include <stdexcept>
#include <string>

namespace gridcascade {

/// Malformed or inconsistent input (case files, edge lists, coordinates, attack ids).
class InputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Syntax or content error in a case file, carrying the offending line.
class ParseError : public InputError {
  public:
    ParseError(int line, const std::string& message)
        : InputError("line " + std::to_string(line) + ": " + message), line_(line) {}

    [[nodiscard]] int line() const noexcept { return line_; }

  private:
    int line_;
};

}  // namespace gridcascade
