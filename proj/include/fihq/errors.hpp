#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fihq {

/// Malformed input text (FIMI files, threshold lists). Maps to CLI exit code 1.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), line_(0) {}

  /// 1-based line number, or 0 when not tied to a line.
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated (dimension mismatch,
/// infeasible plan handed to sanitize, guard exceeded). Maps to exit code 2.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Every sensitive itemset is already below its hiding threshold.
class NothingToHide : public ContractError {
 public:
  NothingToHide() : ContractError("nothing to hide: every sensitive itemset is already hidden") {}
};

class InstanceTooLarge : public ContractError {
 public:
  using ContractError::ContractError;
};

}  // namespace fihq
