#pragma once

#include <stdexcept>
#include <string>

namespace dpstore {

// Base class for all errors raised by this library. Each subclass maps to a
// distinct CLI exit code (see tools/bench_main.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller-supplied value is outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A privacy-budget charge would push the ledger past its total.
class BudgetExceededError : public Error {
 public:
  BudgetExceededError(const std::string& label, double requested, double total)
      : Error("budget exceeded by charge '" + label + "' (requested " +
              std::to_string(requested) + ", total " + std::to_string(total) + ")"),
        label_(label) {}

  const std::string& label() const { return label_; }

 private:
  std::string label_;
};

// A bucket's true record count exceeded its padded capacity (probability
// bounded by beta at setup). Setup aborts instead of dropping records.
class BucketOverflowError : public Error {
 public:
  using Error::Error;
};

// A sanitizer released a count below the true count (probability bounded by
// beta at setup).
class UndershootError : public Error {
 public:
  using Error::Error;
};

// The ORAM stash grew past its configured bound.
class OramOverflowError : public Error {
 public:
  using Error::Error;
};

// A dynamic store ran out of pre-provisioned ORAM addresses.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// The operation is not defined for this store type.
class UnsupportedOperationError : public Error {
 public:
  using Error::Error;
};

// Malformed client/server interaction (bad index, corrupt ciphertext, ...).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace dpstore
