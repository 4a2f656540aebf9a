#pragma once

#include <stdexcept>
#include <string>

namespace cppdd {

/// Misuse of an API contract (mismatched moduli, bad lengths, out-of-range input).
class UsageError : public std::invalid_argument {
 public:
  explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

/// Attempt to invert the zero element.
class ZeroInverseError : public std::domain_error {
 public:
  ZeroInverseError() : std::domain_error("modular inverse of zero") {}
};

class SetupError : public std::runtime_error {
 public:
  explicit SetupError(const std::string& what) : std::runtime_error(what) {}
};

class IngestError : public std::runtime_error {
 public:
  explicit IngestError(const std::string& what) : std::runtime_error(what) {}
};

/// A message failed MAC verification or replay checks; it is dropped, never delivered.
class AuthenticationError : public std::runtime_error {
 public:
  explicit AuthenticationError(const std::string& what) : std::runtime_error(what) {}
};

/// A chain state arrived out of order relative to the relay position.
class ProtocolOrderError : public std::runtime_error {
 public:
  explicit ProtocolOrderError(const std::string& what) : std::runtime_error(what) {}
};

/// Payload recovery was requested after a protocol-wide abort.
class SuppressedByAbortError : public std::runtime_error {
 public:
  SuppressedByAbortError() : std::runtime_error("payload recovery suppressed by abort") {}
};

class WireError : public std::runtime_error {
 public:
  explicit WireError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cppdd
