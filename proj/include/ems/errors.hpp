#pragma once

#include <stdexcept>
#include <string>

namespace ems {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition (bad lengths, out-of-range
/// values, inconsistent sides).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Bad or missing run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dataset file could not be loaded or failed validation.
class DatasetError : public Error {
 public:
  using Error::Error;
};

/// Transport-level failure talking to a chat/embedding endpoint.
class GatewayError : public Error {
 public:
  GatewayError(const std::string& message, int status = 0, bool retryable = false)
      : Error(message), status_(status), retryable_(retryable) {}

  int status() const { return status_; }
  bool retryable() const { return retryable_; }

 private:
  int status_ = 0;
  bool retryable_ = false;
};

/// An error that carries the raw model reply that caused it.
class ReplyError : public Error {
 public:
  ReplyError(const std::string& message, std::string raw_reply)
      : Error(message), raw_reply_(std::move(raw_reply)) {}

  const std::string& raw_reply() const { return raw_reply_; }

 private:
  std::string raw_reply_;
};

class ExtractionError : public ReplyError {
 public:
  using ReplyError::ReplyError;
};

class MatchingError : public ReplyError {
 public:
  using ReplyError::ReplyError;
};

class ScoringError : public ReplyError {
 public:
  using ReplyError::ReplyError;
};

class ReportError : public Error {
 public:
  using Error::Error;
};

}  // namespace ems
