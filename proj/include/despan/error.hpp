#ifndef DESPAN_ERROR_HPP
#define DESPAN_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace despan {

// Raised when an argument violates an operation's precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised by the text-format readers; carries the 1-based offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace despan

#endif  // DESPAN_ERROR_HPP
