#pragma once

#include <stdexcept>
#include <string>

namespace hgp {

enum class ErrorCode {
  Config = 1,
  Scope = 2,
  Resource = 3,
  Precondition = 4,
  Structure = 5,
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::Config, w) {}
};

// The certificate or chain makes no claim at the requested radius/level.
struct ScopeError : Error {
  explicit ScopeError(const std::string& w) : Error(ErrorCode::Scope, w) {}
};

// A configured cap would be exceeded. Never truncate silently.
struct ResourceError : Error {
  explicit ResourceError(const std::string& w) : Error(ErrorCode::Resource, w) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& w) : Error(ErrorCode::Precondition, w) {}
};

struct StructureError : Error {
  explicit StructureError(const std::string& w) : Error(ErrorCode::Structure, w) {}
};

}  // namespace hgp
