#pragma once

#include <stdexcept>

namespace hetsched {

// Malformed or inconsistent user input (files, flags, chromosome shapes).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hetsched
