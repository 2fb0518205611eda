#pragma once

#include <stdexcept>
#include <string>

namespace critspec {

// Error categories used across the library. Each maps onto one of the
// failure classes of the public operations; the CLI translates them into
// exit codes.

struct invalid_argument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct resource_limit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct out_of_range : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct insufficient_data : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct singular_point : std::domain_error {
  using std::domain_error::domain_error;
};

struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw invalid_argument(message);
}

}  // namespace detail
}  // namespace critspec
