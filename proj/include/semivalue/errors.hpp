#pragma once

#include <stdexcept>

namespace semivalue {

// Violated input contract of a library operation.  The CLI maps this to
// exit code 3.
class PreconditionError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// File-system or parse failure.  CLI exit code 4.
class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace semivalue
