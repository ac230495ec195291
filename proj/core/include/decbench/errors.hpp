#pragma once

#include <stdexcept>
#include <string>

namespace decbench {

// Error taxonomy shared by library and CLI. The CLI maps kinds to exit
// codes: input/config -> 2, capability -> 3, everything else -> 4.
enum class ErrorKind {
    input,       // bad argument or malformed data
    config,      // invalid configuration, unresolved name, strategy/field mismatch
    capability,  // backend cannot serve the requested operation
    range,       // value outside a finalized pool or numeric contract
    eval,        // evaluation failed on a specific item
    io,          // filesystem problem
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

  private:
    ErrorKind kind_;
};

struct InputError : Error {
    explicit InputError(const std::string& what) : Error(ErrorKind::input, what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

struct CapabilityError : Error {
    explicit CapabilityError(const std::string& what) : Error(ErrorKind::capability, what) {}
};

struct RangeError : Error {
    explicit RangeError(const std::string& what) : Error(ErrorKind::range, what) {}
};

struct EvalError : Error {
    explicit EvalError(const std::string& what) : Error(ErrorKind::eval, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace decbench
