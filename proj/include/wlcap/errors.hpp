#pragma once

#include <stdexcept>
#include <string>

namespace wlcap {

/// A precondition on an argument was violated (n == 0, range out of (0, sqrt 2], ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Exhaustive search requested on an instance larger than it can handle.
class SizeLimit : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A multicast session could not be routed (disconnected cell graph or node graph).
class RoutingFailure : public std::runtime_error {
 public:
  RoutingFailure(const std::string& what, long session = -1)
      : std::runtime_error(what), session_(session) {}
  long session() const noexcept { return session_; }

 private:
  long session_;
};

/// Numeric input that cannot be processed, e.g. a nonpositive value in a log-log fit.
class InvalidData : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed experiment configuration.
class InvalidConfig : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wlcap
