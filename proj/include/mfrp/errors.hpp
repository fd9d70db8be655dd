#pragma once

#include <stdexcept>
#include <string>

namespace mfrp {

// Refusal to run a 2^n enumeration past the configured variable cap.
class CapError : public std::runtime_error {
 public:
  CapError(std::size_t n, std::size_t cap)
      : std::runtime_error("enumeration refused: " + std::to_string(n) +
                           " variables exceeds cap " + std::to_string(cap)),
        n_(n),
        cap_(cap) {}
  std::size_t n() const noexcept { return n_; }
  std::size_t cap() const noexcept { return cap_; }

 private:
  std::size_t n_;
  std::size_t cap_;
};

// Malformed text input; line numbers are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace mfrp
