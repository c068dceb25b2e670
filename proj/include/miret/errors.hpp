#pragma once

#include <stdexcept>

namespace miret {

/// Raised for malformed inputs (files, configurations, models).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace miret
