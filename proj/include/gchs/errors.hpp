#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gchs {

/// Malformed expression text. `position` is a 0-based byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// log of a non-positive value, division by zero, non-finite result, ...
class NumericDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Frame matrix singular or with condition number above the accepted limit.
class FrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension or structural mismatch between arguments (odd n for a phase-space
/// operation, point of the wrong size, non-antisymmetric J, ...).
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gchs
