#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvdistill {

/// Argument or state outside the domain of an operation (uncertainty violation,
/// non-positive variance, mismatched axes, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed record or projection file. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Post-selection kept fewer than two samples, so no variance can be formed.
class InsufficientSamples : public std::runtime_error {
 public:
  explicit InsufficientSamples(std::size_t accepted)
      : std::runtime_error("insufficient selected samples: " + std::to_string(accepted) +
                           " accepted"),
        accepted_(accepted) {}

  std::size_t accepted() const noexcept { return accepted_; }

 private:
  std::size_t accepted_;
};

/// A selection whose probability underflowed, or a filter that retained nothing.
class EmptySelection : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvdistill
