#pragma once

#include <stdexcept>
#include <string>

namespace techroute {

// Error taxonomy. Every error the library raises derives from std::runtime_error
// so callers that do not care about the category can catch one type.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A decision that violates one of the routing constraints.
struct FeasibilityError : std::runtime_error {
  FeasibilityError(std::string constraint, const std::string& what)
      : std::runtime_error(what), constraint_(std::move(constraint)) {}
  const std::string& constraint() const noexcept { return constraint_; }

 private:
  std::string constraint_;
};

struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LookupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct VersionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OracleLimitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace techroute
