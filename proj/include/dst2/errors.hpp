#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dst2 {

// Bad input: unknown vertex, negative cost, malformed parameter.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A structure (shallow tree, LP, exhaustive search) would exceed its cap.
class SizeError : public std::length_error {
 public:
  SizeError(const std::string& what, std::size_t projected, std::size_t cap)
      : std::length_error(what + " (projected " + std::to_string(projected) +
                          ", cap " + std::to_string(cap) + ")"),
        projected_(projected),
        cap_(cap) {}

  std::size_t projected() const noexcept { return projected_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t projected_;
  std::size_t cap_;
};

// The LP solution does not describe the flows the model promised.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parse failures for instance, LP and solution files.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? what + " (line " + std::to_string(line) + ")"
                                : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dst2
