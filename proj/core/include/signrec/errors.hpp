#pragma once

#include <stdexcept>
#include <string>

namespace signrec {

// Malformed or inconsistent input data (bad files, arity mismatches, ...).
// The CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure (divergence, failed gradient check). CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace signrec
