#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sandwich {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the operation's domain (non-positive input, s outside (0,1), ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic produced a non-finite value.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Requested output cannot be produced by the pool (e.g. output >= reserve).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Attacker profit keeps increasing with input; no finite optimum.
class UnboundedOptimumError : public Error {
 public:
  using Error::Error;
};

/// Attacker profit has no interior maximum on (0, inf).
class NoInteriorOptimumError : public Error {
 public:
  using Error::Error;
};

/// The victim's trade would revert under the given plan.
class VictimRevertedError : public Error {
 public:
  using Error::Error;
};

class NotEnoughDataError : public Error {
 public:
  using Error::Error;
};

/// Fixed-point search ran out of iterations; carries the last bracket.
class SearchFailureError : public Error {
 public:
  SearchFailureError(const std::string& what, double lo, double hi)
      : Error(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

/// Malformed or incomplete input files. Messages carry file/line context.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// Structurally valid data with an invalid value (e.g. non-positive reserve).
class DataError : public Error {
 public:
  DataError(const std::string& what, std::int64_t block) : Error(what), block_(block) {}
  std::int64_t block() const noexcept { return block_; }

 private:
  std::int64_t block_;
};

}  // namespace sandwich
