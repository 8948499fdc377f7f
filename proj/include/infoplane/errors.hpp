#pragma once

#include <stdexcept>
#include <string>

namespace infoplane {

// Invalid argument to a library operation (bad fraction, empty subset, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed dataset/config/CSV text input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Dataset where one input pattern maps to two labels.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite value encountered during forward/backward/estimation.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& detail, int layer)
      : std::runtime_error(detail + " (layer " + std::to_string(layer) + ")"), detail_(detail), layer_(layer) {}
  int layer() const noexcept { return layer_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  int layer_;
};

// Trace directory problems: bad magic, truncation, shape mismatch, missing files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Estimator configuration that cannot apply to the given data
// (e.g. literal aKDE scaling with a negative maximum).
class ModeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace infoplane
