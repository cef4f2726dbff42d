#ifndef TGRASP_ERRORS_HPP
#define TGRASP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tgrasp {

/// Bad or inconsistent configuration (mismatched sizes, missing calibration, empty grids).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An argument outside the mathematical domain of an operation.
struct InputDomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// An operation invoked on an object in the wrong state.
struct StateError : std::logic_error {
  using std::logic_error::logic_error;
};

struct LookupError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct FitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Publishing a payload that does not match the topic's registered type.
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

/// A test protocol that could not reach its termination condition.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed binary log. Carries the byte offset where parsing stopped.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

} // namespace tgrasp

#endif // TGRASP_ERRORS_HPP
