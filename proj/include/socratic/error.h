#ifndef SOCRATIC_ERROR_H_
#define SOCRATIC_ERROR_H_

#include <stdexcept>
#include <string>

namespace socratic {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data: bad CSV cells, dimension mismatch,
// out-of-domain values.
class DataError : public Error {
 public:
  using Error::Error;
};

// A configuration value outside its admissible range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// An objective or gradient became non-finite, or a numerical precondition
// (e.g. invertibility) does not hold.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace socratic

#endif  // SOCRATIC_ERROR_H_
