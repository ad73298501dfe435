#pragma once

#include <stdexcept>
#include <string>

namespace morsegap {

// Exit codes follow the CLI contract: 2 validation, 3 capacity, 4 invariant.
class Error : public std::runtime_error {
public:
  Error(const std::string& what, int exit_code)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

private:
  int exit_code_;
};

class ValidationError : public Error {
public:
  explicit ValidationError(const std::string& what) : Error(what, 2) {}
};

class CapacityError : public Error {
public:
  explicit CapacityError(const std::string& what) : Error(what, 3) {}
};

class InvariantViolation : public Error {
public:
  explicit InvariantViolation(const std::string& what) : Error(what, 4) {}
};

// Sign pattern of a saddle does not fit the gap formula's case table.
class InconsistencyError : public Error {
public:
  explicit InconsistencyError(const std::string& what) : Error(what, 2) {}
};

} // namespace morsegap
